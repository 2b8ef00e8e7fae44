// pipeline.hpp - stage orchestration, artifact emission, run manifest
#pragma once

#include <string>
#include <vector>

#include "dicke/chaos_map.hpp"
#include "dicke/config.hpp"
#include "dicke/eigensolve.hpp"
#include "dicke/husimi.hpp"
#include "dicke/surrogate.hpp"

namespace dicke {

inline constexpr const char* tool_version = "1.0.0";

enum class Stage { spectrum, classical, stats, husimi, mixed, all };

Stage parse_stage(const std::string& name);  // throws ConfigError on typos

// Runs one stage, or every stage in dependency order. Artifacts land under
// cfg.out_dir, heavyweight intermediates under cfg.out_dir/cache, and
// manifest.json is refreshed after every finished stage. With resume set,
// stages whose recorded artifacts still digest-match are skipped.
void run_pipeline(const RunConfig& cfg, Stage stage, bool resume = false);

// Loads the eigenpairs of one spin size over one scaled-energy window from
// the cache, or solves and stores them when allow_solve permits. A cache that
// does not cover the window is resolved; a miss with allow_solve off reports
// which stage to run first.
EigenSolution obtain_spectrum(const RunConfig& cfg, double j, const EpsWindow& w,
                              bool allow_solve = true);

// Same contract for a classification grid at one shell energy.
classical::ClassicalityGrid obtain_grid(const RunConfig& cfg, double eps,
                                        bool allow_solve = true);

// Surrogate mixture read off a finished grid: one chaotic share per connected
// chaotic patch, the rest regular.
stats::MixtureSpec grid_mixture(const classical::ClassicalityGrid& g);

// Phase-space measures of one window eigenstate: moments of the coherent
// field split by the classical chart, plus shell occupation ratios.
struct StateMeasures {
    int k{0};  // position in the merged window listing
    double eps{0.0};
    int parity{0};
    bool converged{true};
    std::vector<double> m;  // one value per configured moment
    double l1{0.0};
    double l2{0.0};
};

// coherent field of one state over the section cells, for map exports
struct FieldExport {
    int k{0};
    std::vector<double> values;  // aligned with the section point list
};

// Measures every converged window state of a solution against a section grid.
// When fields is given, states named in cfg.field_states get their raw field
// copied there.
std::vector<StateMeasures> window_measures(const RunConfig& cfg, const EigenSolution& sol,
                                           const classical::ClassicalityGrid& grid,
                                           const EpsWindow& w,
                                           std::vector<FieldExport>* fields = nullptr);

// Occupation ceiling of the same window: random Gaussian superpositions of
// its converged states, measured over the identical shell sample.
RandomOccupation window_thresholds(const RunConfig& cfg, const EigenSolution& sol,
                                   const classical::ClassicalityGrid& grid, const EpsWindow& w,
                                   int ensemble_size = 20);

}  // namespace dicke
