// mixed.cpp - phase classification bookkeeping and scaling fits
#include "dicke/mixed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dicke {

ClassifyBands default_bands(int f) {
    if (f == 1) return {-0.8, 0.7};
    if (f == 2) return {-0.8, 0.85};
    throw std::invalid_argument("default_bands: f must be 1 or 2");
}

StateClass classify_state(double m, const ClassifyBands& bands) {
    if (!(bands.lo < bands.hi)) throw std::invalid_argument("classify_state: bands inverted");
    if (m < bands.lo) return StateClass::regular;
    if (m > bands.hi) return StateClass::chaotic;
    return StateClass::mixed;  // band endpoints belong to the mixed class
}

double mixed_fraction(const std::vector<double>& ms, const ClassifyBands& bands) {
    if (ms.empty()) throw std::invalid_argument("mixed_fraction: no states");
    long n = 0;
    for (double m : ms)
        if (classify_state(m, bands) == StateClass::mixed) ++n;
    return static_cast<double>(n) / static_cast<double>(ms.size());
}

PowerLaw fit_power_law(const std::vector<double>& js, const std::vector<double>& etas) {
    if (js.size() != etas.size() || js.size() < 2)
        throw std::invalid_argument("fit_power_law: need two or more matched points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(js.size());
    for (std::size_t i = 0; i < js.size(); ++i) {
        if (!(js[i] > 0.0) || !(etas[i] > 0.0))
            throw std::invalid_argument("fit_power_law: points must be positive");
        const double x = std::log(js[i]), y = std::log(etas[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12)
        throw std::invalid_argument("fit_power_law: spin sizes do not separate");
    const double slope = (n * sxy - sx * sy) / denom;
    const double inter = (sy - slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < js.size(); ++i) {
        const double r = std::log(etas[i]) - (inter + slope * std::log(js[i]));
        ss += r * r;
    }
    return {-slope, std::exp(inter), std::sqrt(ss / n)};
}

BandScan scan_bands(const std::vector<EnsemblePoint>& pts, const std::vector<double>& lo_grid,
                    const std::vector<double>& hi_grid, double min_width) {
    if (pts.size() < 2) throw std::invalid_argument("scan_bands: need two or more ensembles");
    BandScan out;
    out.xi_min = std::numeric_limits<double>::infinity();
    out.xi_max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (double lo : lo_grid)
        for (double hi : hi_grid) {
            if (hi - lo < min_width) continue;
            std::vector<double> js, etas;
            bool usable = true;
            for (const auto& pt : pts) {
                const double eta = mixed_fraction(pt.ms, {lo, hi});
                if (eta <= 0.0) {
                    usable = false;
                    break;
                }
                js.push_back(pt.j);
                etas.push_back(eta);
            }
            if (!usable) continue;
            const double xi = fit_power_law(js, etas).xi;
            sum += xi;
            out.xi_min = std::min(out.xi_min, xi);
            out.xi_max = std::max(out.xi_max, xi);
            ++out.n_bands;
        }
    if (out.n_bands == 0) throw std::runtime_error("scan_bands: every band pair was degenerate");
    out.xi_mean = sum / out.n_bands;
    return out;
}

}  // namespace dicke
