#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "numgame/example_set.hpp"
#include "numgame/hypothesis_space.hpp"

namespace numgame {

enum class LikelihoodMode { SizePrinciple, Binary };
enum class InferenceMode { HypothesisAveraging, MAP, MaxLikelihood };

std::string_view to_string(LikelihoodMode mode) noexcept;
std::string_view to_string(InferenceMode mode) noexcept;
LikelihoodMode parse_likelihood_mode(std::string_view text);
InferenceMode parse_inference_mode(std::string_view text);

struct ModelConfig {
    double lambda = 0.5; ///< prior mass on rules
    double alpha = 1.0;  ///< probability of concept-driven generation; lapse is 1 - alpha
    LikelihoodMode likelihood_mode = LikelihoodMode::SizePrinciple;
    InferenceMode inference_mode = InferenceMode::HypothesisAveraging;
    bool use_prior = true;
    int domain_max = 100;

    /// Builds a config with use_prior derived from the inference mode.
    static ModelConfig make(double lambda, double alpha, LikelihoodMode likelihood,
                            InferenceMode inference, int domain_max = 100);

    static ModelConfig baseline(int domain_max = 100);       // lambda 0.5, alpha 1
    static ModelConfig human_best_fit(int domain_max = 100); // lambda 0.9, alpha 0.85
    static ModelConfig gpt_best_fit(int domain_max = 100);   // lambda 1, alpha 1

    /// Resolves "baseline", "human-fit", "gpt-fit", "binl", "map" or "maxl".
    /// Variants take the given lambda/alpha.
    static ModelConfig preset(std::string_view name, double lambda, double alpha,
                              int domain_max = 100);

    void validate() const;
    [[nodiscard]] std::string label() const;
};

struct PosteriorDistribution {
    std::vector<double> weights; ///< aligned with HypothesisSpace order
    double log_evidence = 0.0;
};

struct PredictionVector {
    std::string set_id;
    std::vector<double> values; ///< values[y - 1] = P(y in concept | X)
};

/// Mixture-of-uniforms prior. When one component has no hypotheses its mass
/// moves to the other; selecting only an empty component is an EmptySupport error.
std::vector<double> prior(const HypothesisSpace& space, double lambda);

double likelihood_strict(const ExampleSet& x, const Hypothesis& h);
double likelihood_noisy(const ExampleSet& x, const Hypothesis& h, double alpha, int domain_max);
double likelihood_binary(const ExampleSet& x, const Hypothesis& h);

/// Log of the configured likelihood. SizePrinciple is the noisy size-principle
/// likelihood (strict at alpha = 1); Binary is the product over examples of
/// 1 for members and 1 - alpha for non-members (0/1 conformity at alpha = 1).
double log_likelihood(const ExampleSet& x, const Hypothesis& h, LikelihoodMode mode,
                      double alpha, int domain_max);

PosteriorDistribution posterior(const HypothesisSpace& space, const ExampleSet& x,
                                const ModelConfig& config);

/// Per-target likelihood mass split by hypothesis kind, each part scaled by
/// exp(-log_scale). Independent of lambda, so a lambda sweep reuses it.
struct SupportProfile {
    struct Part {
        std::vector<double> mass; ///< mass[y - 1] = sum of scaled likelihoods of members containing y
        double total = 0.0;
        double log_scale = 0.0;
        std::size_t count = 0;
    };
    Part rules;
    Part intervals;
    double alpha = 1.0;
    LikelihoodMode likelihood_mode = LikelihoodMode::SizePrinciple;
};

SupportProfile support_profile(const HypothesisSpace& space, const ExampleSet& x,
                               LikelihoodMode mode, double alpha);

/// Hypothesis-averaging prediction for one lambda from a cached profile.
std::vector<double> predict_from_profile(const SupportProfile& profile, double lambda);

PredictionVector predict_averaging(const HypothesisSpace& space, const ExampleSet& x,
                                   const ModelConfig& config);
PredictionVector predict_map(const HypothesisSpace& space, const ExampleSet& x,
                             const ModelConfig& config);
PredictionVector predict_maxl(const HypothesisSpace& space, const ExampleSet& x,
                              const ModelConfig& config);
PredictionVector predict(const HypothesisSpace& space, const ExampleSet& x,
                         const ModelConfig& config);

/// Selected hypothesis index for MAP / MaxL. Ties go to the smaller
/// hypothesis, then Rule before Interval, then space order.
std::size_t map_hypothesis(const HypothesisSpace& space, const ExampleSet& x,
                           const ModelConfig& config);
std::size_t maxl_hypothesis(const HypothesisSpace& space, const ExampleSet& x,
                            const ModelConfig& config);

} // namespace numgame
