// ratio_stats.hpp - consecutive-gap ratio statistics and distribution tests
#pragma once

#include <functional>
#include <numbers>
#include <vector>

namespace dicke::stats {

// folded ratios r_i = min(g_i, g_i+1) / max(g_i, g_i+1) of consecutive gaps;
// the input is sorted internally, ratios touching a zero gap are dropped
std::vector<double> fold_ratios(std::vector<double> levels);

// same fold with a degeneracy floor: gaps at or below floor_gap are treated
// as accidental degeneracies, dropped from the sequence and counted
struct FoldedRatios {
    std::vector<double> ratios;
    long degenerate{0};
};

FoldedRatios fold_ratios_guarded(std::vector<double> levels, double floor_gap);

// folded reference laws on [0, 1]
double poisson_ratio_pdf(double r);
double poisson_ratio_cdf(double r);
double goe_ratio_pdf(double r);
double goe_ratio_cdf(double r);  // cumulative quadrature behind a lazy table

inline constexpr double poisson_ratio_mean = 2.0 * std::numbers::ln2 - 1.0;
inline const double goe_ratio_mean = 4.0 - 2.0 * std::numbers::sqrt3;

double mean(const std::vector<double>& xs);

// Anderson-Darling statistic of samples against a reference CDF
double anderson_darling(std::vector<double> samples, const std::function<double(double)>& cdf);

// piecewise-linear CDF through (x_i, (i + 1/2)/n), pinned to 0 and 1 at the
// interval ends; the reference curve built from surrogate ratio samples
class EmpiricalCdf {
  public:
    explicit EmpiricalCdf(std::vector<double> samples, double lo = 0.0, double hi = 1.0);
    double operator()(double x) const;

  private:
    std::vector<double> xs_, fs_;
};

}  // namespace dicke::stats
