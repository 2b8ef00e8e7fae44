// ratio_stats.cpp - ratio folding, reference laws, Anderson-Darling
#include "dicke/ratio_stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace dicke::stats {

std::vector<double> fold_ratios(std::vector<double> levels) {
    std::sort(levels.begin(), levels.end());
    std::vector<double> out;
    if (levels.size() < 3) return out;
    out.reserve(levels.size() - 2);
    for (std::size_t i = 0; i + 2 < levels.size(); ++i) {
        const double a = levels[i + 1] - levels[i];
        const double b = levels[i + 2] - levels[i + 1];
        if (a <= 0.0 || b <= 0.0) continue;
        out.push_back(std::min(a, b) / std::max(a, b));
    }
    return out;
}

FoldedRatios fold_ratios_guarded(std::vector<double> levels, double floor_gap) {
    std::sort(levels.begin(), levels.end());
    FoldedRatios out;
    std::vector<double> gaps;
    gaps.reserve(levels.size());
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
        const double g = levels[i + 1] - levels[i];
        if (g <= floor_gap)
            ++out.degenerate;
        else
            gaps.push_back(g);
    }
    for (std::size_t i = 0; i + 1 < gaps.size(); ++i)
        out.ratios.push_back(std::min(gaps[i], gaps[i + 1]) / std::max(gaps[i], gaps[i + 1]));
    return out;
}

double poisson_ratio_pdf(double r) {
    if (r < 0.0 || r > 1.0) return 0.0;
    const double d = 1.0 + r;
    return 2.0 / (d * d);
}

double poisson_ratio_cdf(double r) {
    if (r <= 0.0) return 0.0;
    if (r >= 1.0) return 1.0;
    return 2.0 * r / (1.0 + r);
}

double goe_ratio_pdf(double r) {
    if (r < 0.0 || r > 1.0) return 0.0;
    const double s = 1.0 + r + r * r;
    return 6.75 * (r + r * r) / (s * s * std::sqrt(s));
}

namespace {

// cumulative Gauss-Legendre integration of the folded law on a fixed grid
struct GoeCdfTable {
    static constexpr int cells = 2048;
    std::array<double, cells + 1> cum{};

    GoeCdfTable() {
        // 5-point nodes and weights on [-1, 1]
        const double ns[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                              0.5384693101056831, 0.9061798459386640};
        const double ws[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                              0.4786286704993665, 0.2369268850561891};
        cum[0] = 0.0;
        const double h = 1.0 / cells;
        for (int i = 0; i < cells; ++i) {
            const double a = i * h, mid = a + 0.5 * h;
            double acc = 0.0;
            for (int k = 0; k < 5; ++k) acc += ws[k] * goe_ratio_pdf(mid + 0.5 * h * ns[k]);
            cum[i + 1] = cum[i] + 0.5 * h * acc;
        }
    }
};

}  // namespace

double goe_ratio_cdf(double r) {
    static const GoeCdfTable table;
    if (r <= 0.0) return 0.0;
    if (r >= 1.0) return table.cum[GoeCdfTable::cells];
    const double pos = r * GoeCdfTable::cells;
    const int i = std::min(static_cast<int>(pos), GoeCdfTable::cells - 1);
    const double frac = pos - i;
    return table.cum[i] * (1.0 - frac) + table.cum[i + 1] * frac;
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty sample");
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
}

double anderson_darling(std::vector<double> samples,
                        const std::function<double(double)>& cdf) {
    const std::size_t n = samples.size();
    if (n == 0) throw std::invalid_argument("anderson_darling: empty sample");
    std::sort(samples.begin(), samples.end());
    const double tiny = 1e-12;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double fl = std::clamp(cdf(samples[i]), tiny, 1.0 - tiny);
        const double fr = std::clamp(cdf(samples[n - 1 - i]), tiny, 1.0 - tiny);
        acc += (2.0 * static_cast<double>(i) + 1.0) * (std::log(fl) + std::log1p(-fr));
    }
    return -static_cast<double>(n) - acc / static_cast<double>(n);
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples, double lo, double hi) {
    if (samples.empty()) throw std::invalid_argument("EmpiricalCdf: empty sample");
    std::sort(samples.begin(), samples.end());
    if (samples.front() < lo || samples.back() > hi)
        throw std::invalid_argument("EmpiricalCdf: samples outside the stated interval");
    const std::size_t n = samples.size();
    xs_.reserve(n + 2);
    fs_.reserve(n + 2);
    xs_.push_back(lo);
    fs_.push_back(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        xs_.push_back(samples[i]);
        fs_.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    }
    xs_.push_back(hi);
    fs_.push_back(1.0);
}

double EmpiricalCdf::operator()(double x) const {
    if (x <= xs_.front()) return 0.0;
    if (x >= xs_.back()) return 1.0;
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
    const double x0 = xs_[i - 1], x1 = xs_[i];
    const double f0 = fs_[i - 1], f1 = fs_[i];
    if (x1 <= x0) return f1;
    return f0 + (f1 - f0) * (x - x0) / (x1 - x0);
}

}  // namespace dicke::stats
