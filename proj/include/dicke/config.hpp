// config.hpp - run configuration, presets, strict json round trip
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dicke/eigensolve.hpp"
#include "dicke/mixed.hpp"

namespace dicke {

// bad or contradictory run settings (CLI exit code 2)
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// a required upstream artifact is absent (CLI exit code 4)
struct DependencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// scaled-energy interval [center - half_width, center + half_width]
struct EpsWindow {
    double center{0.0};
    double half_width{0.1};
};

// band choices for the exponent scan: the upper edge stays put by default
// while the lower edge sweeps the whole mixed range
struct BandScanSpec {
    double lo_min{-0.80};
    double lo_max{0.45};
    double hi_min{0.70};
    double hi_max{0.70};
    double step{0.05};
    double min_width{0.2};  // only bands at least this wide count
};

struct RunConfig {
    ModelParams model{};

    // basis and solver policy
    BasisKind basis{BasisKind::fock};
    int truncation{0};    // 0 = adaptive from the classical support
    double growth{1.25};  // truncation growth factor between rounds
    double delta{1e-6};   // convergence tail bound

    // the analysis window feeds the husimi and mixed stages; extra windows are
    // solved and profiled by the statistics stage as well
    EpsWindow analysis{0.0, 0.05};
    std::vector<EpsWindow> extra_windows;

    // spectral statistics
    int histogram_bins{25};
    std::uint64_t surrogate_levels{100000};

    // classical map
    std::vector<double> grid_eps;
    int grid_n{201};
    double grid_span{2.0};
    double lyapunov_time{5000.0};
    double renorm_dt{1.0};
    double lambda_threshold{0.0};  // 0 resolves to max(10 / T, 0.005)
    double ode_tol{1e-11};
    int poincare_orbits{0};  // section orbits per grid energy, 0 skips
    double poincare_time{2000.0};

    // husimi sampling
    std::vector<double> moments{1.0, 2.0, 3.0, 4.0};
    int shell_per_cell{1};
    std::vector<int> field_states;  // window state indices whose fields are exported

    // classification and finite-size scaling
    ClassifyBands bands{-0.8, 0.7};
    std::vector<std::vector<double>> ensembles;
    BandScanSpec scan{};

    std::uint64_t seed{1};
    int workers{1};
    std::string out_dir{"out"};

    void validate() const;  // throws ConfigError on contradictions
};

// built-in parameter sets: "one-photon-paper", "two-photon-paper"
RunConfig preset_config(const std::string& name);

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// canonical serialization; parse_config(dump_config(c)) reproduces c exactly
std::string dump_config(const RunConfig& c);

}  // namespace dicke
