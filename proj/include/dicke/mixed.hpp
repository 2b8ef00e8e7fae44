// mixed.hpp - eigenstate phase classes and the mixed-fraction decay law
#pragma once

#include <vector>

namespace dicke {

enum class StateClass { regular, mixed, chaotic };

// band edges on the delocalization measure; the mixed band is closed, so a
// measure sitting exactly on an edge still counts as mixed
struct ClassifyBands {
    double lo{-0.8};  // below: regular
    double hi{0.7};   // above: chaotic
};

ClassifyBands default_bands(int f);

StateClass classify_state(double m, const ClassifyBands& bands);

// share of states classified as mixed (band endpoints included)
double mixed_fraction(const std::vector<double>& ms, const ClassifyBands& bands);

// least-squares fit of eta = amplitude * j^(-xi)
struct PowerLaw {
    double xi{0.0};
    double amplitude{0.0};
    double residual{0.0};  // rms misfit of log eta
};

PowerLaw fit_power_law(const std::vector<double>& js, const std::vector<double>& etas);

// measures of the window states of one spin size
struct EnsemblePoint {
    double j{0.0};
    std::vector<double> ms;
};

// decay exponents over a grid of band choices at least min_width wide;
// band pairs that zero out any ensemble fraction are skipped
struct BandScan {
    double xi_mean{0.0};
    double xi_min{0.0};
    double xi_max{0.0};
    int n_bands{0};
};

BandScan scan_bands(const std::vector<EnsemblePoint>& pts, const std::vector<double>& lo_grid,
                    const std::vector<double>& hi_grid, double min_width);

}  // namespace dicke
