#include "numgame/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "numgame/error.hpp"
#include "numgame/text.hpp"

namespace numgame {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = static_cast<std::size_t>(-1);

void require_unit(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig,
                    std::string(name) + " must lie in [0, 1], got " + format_double(value));
    }
}

struct MixtureWeights {
    double rule = 0.0;     // prior of each rule hypothesis
    double interval = 0.0; // prior of each interval hypothesis
};

MixtureWeights mixture_weights(std::size_t rules, std::size_t intervals, double lambda) {
    require_unit(lambda, "lambda");
    double rule_mass = lambda;
    double interval_mass = 1.0 - lambda;
    if (rules == 0) {
        if (lambda == 1.0) {
            throw Error(ErrorCode::EmptySupport, "lambda = 1 selects rules but the space has none");
        }
        rule_mass = 0.0;
        interval_mass = 1.0;
    }
    if (intervals == 0) {
        if (lambda == 0.0) {
            throw Error(ErrorCode::EmptySupport,
                        "lambda = 0 selects intervals but the space has none");
        }
        interval_mass = 0.0;
        rule_mass = 1.0;
    }
    return {rules ? rule_mass / static_cast<double>(rules) : 0.0,
            intervals ? interval_mass / static_cast<double>(intervals) : 0.0};
}

[[noreturn]] void throw_zero_evidence(const ExampleSet& x) {
    throw Error(ErrorCode::ZeroEvidence,
                "no hypothesis with prior mass is consistent with example set '" + x.id +
                    "'; use alpha < 1 or a broader rule registry");
}

void check_inputs(const HypothesisSpace& space, const ExampleSet& x, const ModelConfig& config) {
    config.validate();
    if (config.domain_max != space.domain_max()) {
        throw Error(ErrorCode::InvalidConfig, "config domain_max does not match the hypothesis space");
    }
    validate_example_set(x, space.domain_max());
}

/// Log scores closer than this are equal up to rounding.
constexpr double kTieTolerance = 1e-12;

/// Higher score wins; ties prefer the smaller hypothesis, then rules, then earlier index.
std::size_t select_best(const HypothesisSpace& space, const std::vector<double>& scores) {
    std::size_t best = kNone;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] == kNegInf) {
            continue;
        }
        if (best == kNone || scores[i] > scores[best] + kTieTolerance) {
            best = i;
            continue;
        }
        if (scores[i] < scores[best] - kTieTolerance) {
            continue;
        }
        const auto& hi = space[i];
        const auto& hb = space[best];
        if (hi.size() < hb.size() ||
            (hi.size() == hb.size() && hi.kind == HypothesisKind::Rule &&
             hb.kind == HypothesisKind::Interval)) {
            best = i;
        }
    }
    return best;
}

PredictionVector indicator_prediction(const HypothesisSpace& space, const ExampleSet& x,
                                      std::size_t chosen, double alpha) {
    PredictionVector out{x.id, std::vector<double>(static_cast<std::size_t>(space.domain_max()),
                                                   1.0 - alpha)};
    for (int y : space[chosen].extension) {
        out.values[static_cast<std::size_t>(y - 1)] = 1.0;
    }
    return out;
}

} // namespace

std::string_view to_string(LikelihoodMode mode) noexcept {
    return mode == LikelihoodMode::SizePrinciple ? "size" : "binary";
}

std::string_view to_string(InferenceMode mode) noexcept {
    switch (mode) {
    case InferenceMode::HypothesisAveraging: return "avg";
    case InferenceMode::MAP: return "map";
    case InferenceMode::MaxLikelihood: return "maxl";
    }
    return "avg";
}

LikelihoodMode parse_likelihood_mode(std::string_view text) {
    if (text == "size" || text == "size-principle") return LikelihoodMode::SizePrinciple;
    if (text == "binary") return LikelihoodMode::Binary;
    throw Error(ErrorCode::Usage, "unknown likelihood mode '" + std::string(text) +
                                      "' (expected size or binary)");
}

InferenceMode parse_inference_mode(std::string_view text) {
    if (text == "avg" || text == "averaging") return InferenceMode::HypothesisAveraging;
    if (text == "map") return InferenceMode::MAP;
    if (text == "maxl") return InferenceMode::MaxLikelihood;
    throw Error(ErrorCode::Usage,
                "unknown inference mode '" + std::string(text) + "' (expected avg, map or maxl)");
}

ModelConfig ModelConfig::make(double lambda, double alpha, LikelihoodMode likelihood,
                              InferenceMode inference, int domain_max) {
    ModelConfig c;
    c.lambda = lambda;
    c.alpha = alpha;
    c.likelihood_mode = likelihood;
    c.inference_mode = inference;
    c.use_prior = inference != InferenceMode::MaxLikelihood;
    c.domain_max = domain_max;
    return c;
}

ModelConfig ModelConfig::baseline(int domain_max) {
    return make(0.5, 1.0, LikelihoodMode::SizePrinciple, InferenceMode::HypothesisAveraging,
                domain_max);
}

ModelConfig ModelConfig::human_best_fit(int domain_max) {
    return make(0.9, 0.85, LikelihoodMode::SizePrinciple, InferenceMode::HypothesisAveraging,
                domain_max);
}

ModelConfig ModelConfig::gpt_best_fit(int domain_max) {
    return make(1.0, 1.0, LikelihoodMode::SizePrinciple, InferenceMode::HypothesisAveraging,
                domain_max);
}

ModelConfig ModelConfig::preset(std::string_view name, double lambda, double alpha,
                                int domain_max) {
    if (name == "baseline") return baseline(domain_max);
    if (name == "human-fit") return human_best_fit(domain_max);
    if (name == "gpt-fit") return gpt_best_fit(domain_max);
    if (name == "full") {
        return make(lambda, alpha, LikelihoodMode::SizePrinciple,
                    InferenceMode::HypothesisAveraging, domain_max);
    }
    if (name == "binl") {
        return make(lambda, alpha, LikelihoodMode::Binary, InferenceMode::HypothesisAveraging,
                    domain_max);
    }
    if (name == "map") {
        return make(lambda, alpha, LikelihoodMode::SizePrinciple, InferenceMode::MAP, domain_max);
    }
    if (name == "maxl") {
        return make(lambda, alpha, LikelihoodMode::SizePrinciple, InferenceMode::MaxLikelihood,
                    domain_max);
    }
    throw Error(ErrorCode::Usage, "unknown model preset '" + std::string(name) + "'");
}

void ModelConfig::validate() const {
    require_unit(lambda, "lambda");
    require_unit(alpha, "alpha");
    if (domain_max < 1) {
        throw Error(ErrorCode::InvalidDomain, "domain_max must be >= 1");
    }
    if ((inference_mode == InferenceMode::MaxLikelihood) == use_prior) {
        throw Error(ErrorCode::InvalidConfig,
                    "use_prior must be false exactly when the inference mode is maxl");
    }
}

std::string ModelConfig::label() const {
    return "bayes(lambda=" + format_double(lambda) + ";alpha=" + format_double(alpha) + ";" +
           std::string(to_string(likelihood_mode)) + ";" + std::string(to_string(inference_mode)) +
           ")";
}

std::vector<double> prior(const HypothesisSpace& space, double lambda) {
    const auto w = mixture_weights(space.rule_count(), space.interval_count(), lambda);
    std::vector<double> out;
    out.reserve(space.size());
    for (const auto& h : space.hypotheses()) {
        out.push_back(h.kind == HypothesisKind::Rule ? w.rule : w.interval);
    }
    return out;
}

double likelihood_strict(const ExampleSet& x, const Hypothesis& h) {
    if (!h.contains_all(x.examples)) {
        return 0.0;
    }
    return std::pow(static_cast<double>(h.size()), -static_cast<double>(x.length()));
}

double likelihood_noisy(const ExampleSet& x, const Hypothesis& h, double alpha, int domain_max) {
    const double lapse = (1.0 - alpha) / static_cast<double>(domain_max);
    const double member = alpha / static_cast<double>(h.size()) + lapse;
    double p = 1.0;
    for (int xi : x.examples) {
        p *= h.contains(xi) ? member : lapse;
    }
    return p;
}

double likelihood_binary(const ExampleSet& x, const Hypothesis& h) {
    return h.contains_all(x.examples) ? 1.0 : 0.0;
}

double log_likelihood(const ExampleSet& x, const Hypothesis& h, LikelihoodMode mode, double alpha,
                      int domain_max) {
    double inside = 0.0;
    double outside = 0.0;
    if (mode == LikelihoodMode::SizePrinciple) {
        const double lapse = (1.0 - alpha) / static_cast<double>(domain_max);
        inside = std::log(alpha / static_cast<double>(h.size()) + lapse);
        outside = std::log(lapse);
    } else {
        outside = std::log(1.0 - alpha);
    }
    double ll = 0.0;
    for (int xi : x.examples) {
        ll += h.contains(xi) ? inside : outside;
    }
    return ll;
}

PosteriorDistribution posterior(const HypothesisSpace& space, const ExampleSet& x,
                                const ModelConfig& config) {
    check_inputs(space, x, config);
    if (!config.use_prior) {
        throw Error(ErrorCode::InvalidConfig, "posterior requires a config that uses the prior");
    }
    const auto p = prior(space, config.lambda);
    std::vector<double> log_post(space.size(), kNegInf);
    double top = kNegInf;
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (p[i] <= 0.0) {
            continue;
        }
        const double ll = log_likelihood(x, space[i], config.likelihood_mode, config.alpha,
                                         config.domain_max);
        if (ll == kNegInf) {
            continue;
        }
        log_post[i] = std::log(p[i]) + ll;
        top = std::max(top, log_post[i]);
    }
    if (top == kNegInf) {
        throw_zero_evidence(x);
    }
    PosteriorDistribution out;
    out.weights.resize(space.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (log_post[i] != kNegInf) {
            out.weights[i] = std::exp(log_post[i] - top);
            total += out.weights[i];
        }
    }
    for (auto& w : out.weights) {
        w /= total;
    }
    out.log_evidence = top + std::log(total);
    return out;
}

SupportProfile support_profile(const HypothesisSpace& space, const ExampleSet& x,
                               LikelihoodMode mode, double alpha) {
    require_unit(alpha, "alpha");
    validate_example_set(x, space.domain_max());
    const auto n = static_cast<std::size_t>(space.domain_max());

    SupportProfile profile;
    profile.alpha = alpha;
    profile.likelihood_mode = mode;
    std::vector<double> ll(space.size());
    for (auto* part : {&profile.rules, &profile.intervals}) {
        part->mass.assign(n, 0.0);
        part->log_scale = kNegInf;
    }
    for (std::size_t i = 0; i < space.size(); ++i) {
        const auto& h = space[i];
        auto& part = h.kind == HypothesisKind::Rule ? profile.rules : profile.intervals;
        ll[i] = log_likelihood(x, h, mode, alpha, space.domain_max());
        part.log_scale = std::max(part.log_scale, ll[i]);
        ++part.count;
    }
    for (std::size_t i = 0; i < space.size(); ++i) {
        const auto& h = space[i];
        auto& part = h.kind == HypothesisKind::Rule ? profile.rules : profile.intervals;
        if (ll[i] == kNegInf) {
            continue;
        }
        const double scaled = std::exp(ll[i] - part.log_scale);
        part.total += scaled;
        for (int y : h.extension) {
            part.mass[static_cast<std::size_t>(y - 1)] += scaled;
        }
    }
    for (auto* part : {&profile.rules, &profile.intervals}) {
        if (part->log_scale == kNegInf) {
            part->log_scale = 0.0;
        }
    }
    return profile;
}

std::vector<double> predict_from_profile(const SupportProfile& profile, double lambda) {
    const auto w = mixture_weights(profile.rules.count, profile.intervals.count, lambda);
    const SupportProfile::Part* parts[] = {&profile.rules, &profile.intervals};
    const double per_hypothesis[] = {w.rule, w.interval};

    double log_coef[2] = {kNegInf, kNegInf};
    double top = kNegInf;
    for (int k = 0; k < 2; ++k) {
        if (per_hypothesis[k] > 0.0 && parts[k]->total > 0.0) {
            log_coef[k] = std::log(per_hypothesis[k]) + parts[k]->log_scale;
            top = std::max(top, log_coef[k]);
        }
    }
    if (top == kNegInf) {
        throw Error(ErrorCode::ZeroEvidence,
                    "no hypothesis with prior mass is consistent with the examples; use alpha < 1 "
                    "or a broader rule registry");
    }
    double coef[2] = {0.0, 0.0};
    double evidence = 0.0;
    for (int k = 0; k < 2; ++k) {
        if (log_coef[k] != kNegInf) {
            coef[k] = std::exp(log_coef[k] - top);
            evidence += coef[k] * parts[k]->total;
        }
    }
    const double alpha = profile.alpha;
    const auto n = profile.rules.mass.size();
    std::vector<double> values(n);
    for (std::size_t y = 0; y < n; ++y) {
        const double support =
            (coef[0] * profile.rules.mass[y] + coef[1] * profile.intervals.mass[y]) / evidence;
        values[y] = std::clamp((1.0 - alpha) + alpha * support, 0.0, 1.0);
    }
    return values;
}

PredictionVector predict_averaging(const HypothesisSpace& space, const ExampleSet& x,
                                   const ModelConfig& config) {
    check_inputs(space, x, config);
    const auto profile = support_profile(space, x, config.likelihood_mode, config.alpha);
    try {
        return {x.id, predict_from_profile(profile, config.lambda)};
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ZeroEvidence) {
            throw_zero_evidence(x);
        }
        throw;
    }
}

std::size_t map_hypothesis(const HypothesisSpace& space, const ExampleSet& x,
                           const ModelConfig& config) {
    check_inputs(space, x, config);
    const auto p = prior(space, config.lambda);
    std::vector<double> scores(space.size(), kNegInf);
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (p[i] > 0.0) {
            scores[i] = std::log(p[i]) + log_likelihood(x, space[i], config.likelihood_mode,
                                                         config.alpha, config.domain_max);
        }
    }
    const auto best = select_best(space, scores);
    if (best == kNone) {
        throw_zero_evidence(x);
    }
    return best;
}

std::size_t maxl_hypothesis(const HypothesisSpace& space, const ExampleSet& x,
                            const ModelConfig& config) {
    check_inputs(space, x, config);
    std::vector<double> scores(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        scores[i] = log_likelihood(x, space[i], config.likelihood_mode, config.alpha,
                                   config.domain_max);
    }
    const auto best = select_best(space, scores);
    if (best == kNone) {
        throw_zero_evidence(x);
    }
    return best;
}

PredictionVector predict_map(const HypothesisSpace& space, const ExampleSet& x,
                             const ModelConfig& config) {
    return indicator_prediction(space, x, map_hypothesis(space, x, config), config.alpha);
}

PredictionVector predict_maxl(const HypothesisSpace& space, const ExampleSet& x,
                              const ModelConfig& config) {
    return indicator_prediction(space, x, maxl_hypothesis(space, x, config), config.alpha);
}

PredictionVector predict(const HypothesisSpace& space, const ExampleSet& x,
                         const ModelConfig& config) {
    switch (config.inference_mode) {
    case InferenceMode::HypothesisAveraging: return predict_averaging(space, x, config);
    case InferenceMode::MAP: return predict_map(space, x, config);
    case InferenceMode::MaxLikelihood: return predict_maxl(space, x, config);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown inference mode");
}

} // namespace numgame
