#include "numgame/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "numgame/error.hpp"
#include "numgame/inference.hpp"
#include "numgame/text.hpp"

namespace numgame {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Support profiles per example set, computed once per alpha and shared by
/// every lambda at that alpha.
class ProfileCache {
  public:
    ProfileCache(const HypothesisSpace& space, std::vector<const ExampleSet*> sets)
        : space_(space), sets_(std::move(sets)) {}

    const std::vector<SupportProfile>& at(double alpha) {
        auto it = cache_.find(alpha);
        if (it == cache_.end()) {
            std::vector<SupportProfile> profiles;
            profiles.reserve(sets_.size());
            for (const auto* s : sets_) {
                profiles.push_back(
                    support_profile(space_, *s, LikelihoodMode::SizePrinciple, alpha));
            }
            it = cache_.emplace(alpha, std::move(profiles)).first;
        }
        return it->second;
    }

  private:
    const HypothesisSpace& space_;
    std::vector<const ExampleSet*> sets_;
    std::map<double, std::vector<SupportProfile>> cache_;
};

struct Scorer {
    ProfileCache& cache;
    const std::vector<const ExampleSet*>& sets;
    const ResponseMatrix& observed;
    JsdConvention convention;

    /// Per-set JSD, or empty when a set has zero evidence.
    std::vector<double> per_set(double lambda, double alpha) const {
        const auto& profiles = cache.at(alpha);
        std::vector<double> out;
        out.reserve(sets.size());
        for (std::size_t i = 0; i < sets.size(); ++i) {
            std::vector<double> predicted;
            try {
                predicted = predict_from_profile(profiles[i], lambda);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::ZeroEvidence) {
                    return {};
                }
                throw;
            }
            out.push_back(jsd(observed.rows.at(sets[i]->id), predicted, convention));
        }
        return out;
    }

    FitCell cell(double lambda, double alpha) const {
        const auto values = per_set(lambda, alpha);
        if (values.empty()) {
            return {lambda, alpha, kInf};
        }
        return {lambda, alpha, summarize(values).mean};
    }
};

bool better(const FitCell& a, const FitCell& b) {
    if (a.mean_jsd != b.mean_jsd) {
        return a.mean_jsd < b.mean_jsd;
    }
    if (a.lambda != b.lambda) {
        return a.lambda < b.lambda;
    }
    return a.alpha < b.alpha;
}

/// Values k / steps_per_unit within [lo, hi].
std::vector<double> fine_axis(double lo, double hi, double step) {
    const double steps_per_unit = std::round(1.0 / step);
    std::vector<double> out;
    const auto first = static_cast<long>(std::ceil(lo * steps_per_unit - 1e-9));
    const auto last = static_cast<long>(std::floor(hi * steps_per_unit + 1e-9));
    for (long k = first; k <= last; ++k) {
        out.push_back(static_cast<double>(k) / steps_per_unit);
    }
    return out;
}

std::pair<double, double> neighbours(const std::vector<double>& axis, double value) {
    const auto it = std::find(axis.begin(), axis.end(), value);
    const auto i = static_cast<std::size_t>(it - axis.begin());
    return {i > 0 ? axis[i - 1] : value, i + 1 < axis.size() ? axis[i + 1] : value};
}

nlohmann::json cell_json(const FitCell& c) {
    nlohmann::json j{{"lambda", c.lambda}, {"alpha", c.alpha}};
    j["mean_jsd"] = c.feasible() ? nlohmann::json(c.mean_jsd) : nlohmann::json(nullptr);
    j["feasible"] = c.feasible();
    return j;
}

} // namespace

bool FitCell::feasible() const noexcept {
    return std::isfinite(mean_jsd);
}

std::vector<double> parse_grid(std::string_view text) {
    std::vector<double> out;
    for (const auto& field : split(text, ',')) {
        out.push_back(parse_double(field, "grid value"));
    }
    return out;
}

FitResult fit_grid(const HypothesisSpace& space, std::span<const ExampleSet> sets,
                   const ResponseMatrix& observed, const FitOptions& options) {
    auto axis = options.grid_values;
    if (axis.empty()) {
        throw Error(ErrorCode::Usage, "fit grid is empty");
    }
    for (double v : axis) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error(ErrorCode::Usage, "grid value " + format_double(v) + " outside [0, 1]");
        }
    }
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    if (options.refine) {
        const double inv = 1.0 / options.refine_step;
        if (!(options.refine_step > 0.0) || std::abs(inv - std::round(inv)) > 1e-9) {
            throw Error(ErrorCode::Usage, "refine step must divide 1 evenly");
        }
    }
    observed.validate();
    if (observed.domain_max != space.domain_max()) {
        throw Error(ErrorCode::Shape, "observed matrix domain does not match the hypothesis space");
    }

    std::vector<const ExampleSet*> scored;
    FitResult result;
    for (const auto& s : sets) {
        if (observed.rows.count(s.id) != 0 && !result.set_length.count(s.id)) {
            scored.push_back(&s);
            result.set_length.emplace(s.id, s.length());
        }
    }
    if (scored.empty()) {
        throw Error(ErrorCode::NoOverlap, "observed matrix '" + observed.agent +
                                              "' covers none of the example sets");
    }

    ProfileCache cache(space, scored);
    const Scorer scorer{cache, scored, observed, options.convention};

    std::optional<FitCell> best;
    for (double lambda : axis) {
        for (double alpha : axis) {
            const auto c = scorer.cell(lambda, alpha);
            result.grid.push_back(c);
            if (!best || better(c, *best)) {
                best = c;
            }
        }
    }

    if (options.refine && best->feasible()) {
        const auto [lam_lo, lam_hi] = neighbours(axis, best->lambda);
        const auto [alp_lo, alp_hi] = neighbours(axis, best->alpha);
        const auto lambdas = fine_axis(lam_lo, lam_hi, options.refine_step);
        const auto alphas = fine_axis(alp_lo, alp_hi, options.refine_step);
        const auto on_lattice = [&axis](double v) {
            return std::binary_search(axis.begin(), axis.end(), v);
        };
        for (double lambda : lambdas) {
            for (double alpha : alphas) {
                if (on_lattice(lambda) && on_lattice(alpha)) {
                    continue;
                }
                const auto c = scorer.cell(lambda, alpha);
                result.refinement_trace.push_back(c);
                if (better(c, *best)) {
                    best = c;
                }
            }
        }
    }

    if (!best->feasible()) {
        throw Error(ErrorCode::ZeroEvidence,
                    "every grid cell hits zero evidence on some example set");
    }
    result.best_lambda = best->lambda;
    result.best_alpha = best->alpha;
    result.best_mean_jsd = best->mean_jsd;
    const auto values = scorer.per_set(best->lambda, best->alpha);
    for (std::size_t i = 0; i < scored.size(); ++i) {
        result.per_set_at_best.emplace(scored[i]->id, values[i]);
    }
    return result;
}

nlohmann::json FitResult::to_json() const {
    auto grid_json = nlohmann::json::array();
    for (const auto& c : grid) {
        grid_json.push_back(cell_json(c));
    }
    auto refine_json = nlohmann::json::array();
    for (const auto& c : refinement_trace) {
        refine_json.push_back(cell_json(c));
    }
    auto per_set = nlohmann::json::array();
    for (const auto& [id, d] : per_set_at_best) {
        per_set.push_back({{"set_id", id}, {"set_length", set_length.at(id)}, {"jsd", d}});
    }
    return {{"best_lambda", best_lambda},
            {"best_alpha", best_alpha},
            {"best_lapse", 1.0 - best_alpha},
            {"best_mean_jsd", best_mean_jsd},
            {"grid", std::move(grid_json)},
            {"refinement_trace", std::move(refine_json)},
            {"per_set_at_best", std::move(per_set)}};
}

SurfaceExport fit_surface_export(const FitResult& result) {
    std::ostringstream surface;
    surface << "phase,lambda,alpha,mean_jsd,best\n";
    bool marked = false;
    const auto emit = [&](const char* phase, const FitCell& c) {
        const bool is_best = !marked && c.lambda == result.best_lambda &&
                             c.alpha == result.best_alpha;
        marked = marked || is_best;
        surface << phase << ',' << format_double(c.lambda) << ',' << format_double(c.alpha) << ','
                << (c.feasible() ? format_double(c.mean_jsd) : std::string("inf")) << ','
                << (is_best ? 1 : 0) << '\n';
    };
    for (const auto& c : result.grid) {
        emit("grid", c);
    }
    for (const auto& c : result.refinement_trace) {
        emit("refine", c);
    }

    std::ostringstream per_set;
    per_set << "set_id,set_length,jsd\n";
    for (const auto& [id, d] : result.per_set_at_best) {
        per_set << id << ',' << result.set_length.at(id) << ',' << format_double(d) << '\n';
    }
    return {surface.str(), per_set.str()};
}

} // namespace numgame
