#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "numgame/evaluation.hpp"
#include "numgame/example_set.hpp"
#include "numgame/hypothesis_space.hpp"

namespace numgame {

struct FitOptions {
    std::vector<double> grid_values{0.0, 0.01, 0.3, 0.5, 0.7, 0.9, 0.99, 1.0};
    bool refine = true;
    double refine_step = 0.01; ///< 1 / refine_step must be an integer
    JsdConvention convention = JsdConvention::Normalized;
};

struct FitCell {
    double lambda = 0.0;
    double alpha = 0.0;
    double mean_jsd = 0.0; ///< +inf when some set hits zero evidence

    [[nodiscard]] bool feasible() const noexcept;
};

struct FitResult {
    double best_lambda = 0.0;
    double best_alpha = 0.0;
    double best_mean_jsd = 0.0;
    std::vector<FitCell> grid;             ///< lambda-major over the sorted lattice
    std::vector<FitCell> refinement_trace; ///< refined cells not already on the lattice
    std::map<std::string, double> per_set_at_best;
    std::map<std::string, std::size_t> set_length;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Grid search of the full model (size principle + hypothesis averaging) over
/// lambda x alpha, minimizing mean JSD to `observed`, then a local pass at
/// `refine_step` spanning one lattice cell either side of the incumbent.
/// Only sets present in `observed` are scored. Ties go to smaller lambda, then
/// smaller alpha.
FitResult fit_grid(const HypothesisSpace& space, std::span<const ExampleSet> sets,
                   const ResponseMatrix& observed, const FitOptions& options = {});

struct SurfaceExport {
    std::string surface_csv; ///< phase,lambda,alpha,mean_jsd,best
    std::string per_set_csv; ///< set_id,set_length,jsd at the best cell
};

SurfaceExport fit_surface_export(const FitResult& result);

std::vector<double> parse_grid(std::string_view text);

} // namespace numgame
