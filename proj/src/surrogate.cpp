// surrogate.cpp - random-matrix and Poisson level generation
#include "dicke/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "dicke/lapack.hpp"
#include "dicke/ratio_stats.hpp"

namespace dicke::stats {

namespace {

// integrated semicircle law on [-R, R], mapping an eigenvalue to its expected
// rank fraction
double semicircle_cdf(double x, double radius) {
    if (x <= -radius) return 0.0;
    if (x >= radius) return 1.0;
    const double r2 = radius * radius;
    return 0.5 + x * std::sqrt(r2 - x * x) / (std::numbers::pi * r2) +
           std::asin(x / radius) / std::numbers::pi;
}

}  // namespace

std::vector<double> goe_unfolded_block(int n, std::uint64_t seed) {
    if (n < 20) throw std::invalid_argument("goe_unfolded_block: block too small");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // tridiagonal form of the orthogonal ensemble: unit normals on the
    // diagonal, chi variables with decreasing order off it
    Eigen::VectorXd diag(n), off(n - 1);
    for (int i = 0; i < n; ++i) diag[i] = gauss(rng);
    for (int k = 1; k < n; ++k) {
        std::gamma_distribution<double> gamma_half(0.5 * (n - k), 1.0);
        off[k - 1] = std::sqrt(gamma_half(rng));
    }
    Eigen::VectorXd ev = lapack::eig_tridiag_values(std::move(diag), std::move(off));

    // unfold against the limiting density and keep the bulk
    const double radius = std::sqrt(2.0 * n);
    const int cut = static_cast<int>(std::floor(0.05 * n));
    std::vector<double> out;
    out.reserve(n - 2 * cut);
    for (int i = cut; i < n - cut; ++i) out.push_back(n * semicircle_cdf(ev[i], radius));
    const double base = out.front();
    for (double& x : out) x -= base;
    return out;
}

std::vector<double> poisson_block(int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("poisson_block: need at least one level");
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> gap(1.0);
    std::vector<double> out;
    out.reserve(n);
    double run = 0.0;
    for (int i = 0; i < n; ++i) {
        run += gap(rng);
        out.push_back(run);
    }
    return out;
}

void MixtureSpec::validate() const {
    double total = regular;
    if (regular < 0.0) throw std::invalid_argument("surrogate mixture: negative regular share");
    for (const double mu : chaotic) {
        if (mu < 0.0) throw std::invalid_argument("surrogate mixture: negative chaotic share");
        total += mu;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("surrogate mixture: shares must sum to 1");
}

std::vector<double> surrogate_levels(const SurrogateOptions& opts) {
    if (opts.n_levels < 100) throw std::invalid_argument("surrogate_levels: too few levels");
    opts.mix.validate();

    // shares become level counts by cumulative rounding so the total is exact
    std::vector<double> shares = opts.mix.chaotic;
    shares.push_back(opts.mix.regular);
    std::vector<int> counts(shares.size());
    double cum = 0.0;
    long assigned = 0;
    for (std::size_t i = 0; i < shares.size(); ++i) {
        cum += shares[i];
        const long upto = std::lround(cum * opts.n_levels);
        counts[i] = static_cast<int>(upto - assigned);
        assigned = upto;
    }

    std::vector<double> levels;
    levels.reserve(opts.n_levels);
    for (std::size_t i = 0; i + 1 < shares.size(); ++i) {
        const int want = counts[i];
        if (want <= 0) continue;
        // chain trimmed blocks end to end at unit density, then dilute the
        // stream to its share of the superposition
        std::vector<double> chain;
        chain.reserve(want);
        std::uint64_t block_seed = opts.seed + 0x9e3779b97f4a7c15ull * 2 * i;
        double run = 0.0;
        while (static_cast<int>(chain.size()) < want) {
            const auto blk = goe_unfolded_block(opts.block, ++block_seed);
            for (double x : blk) {
                if (static_cast<int>(chain.size()) >= want) break;
                chain.push_back(run + x);
            }
            run = chain.back() + 1.0;
        }
        const double scale = 1.0 / std::max(shares[i], 1e-12);
        for (double x : chain) levels.push_back(x * scale);
    }
    if (counts.back() > 0) {
        const auto blk = poisson_block(counts.back(), opts.seed ^ 0x9e3779b97f4a7c15ull);
        const double scale = 1.0 / std::max(opts.mix.regular, 1e-12);
        for (double x : blk) levels.push_back(x * scale);
    }
    std::sort(levels.begin(), levels.end());
    return levels;
}

std::vector<double> surrogate_ratios(const SurrogateOptions& opts) {
    return fold_ratios(surrogate_levels(opts));
}

std::vector<std::pair<double, double>> mean_ratio_vs_chaos_curve(
    const std::vector<double>& mu_grid, const SurrogateOptions& base, int reps) {
    if (reps < 1) throw std::invalid_argument("mean_ratio_vs_chaos_curve: reps must be positive");
    std::vector<std::pair<double, double>> curve;
    curve.reserve(mu_grid.size());
    for (const double mu : mu_grid) {
        if (mu < 0.0 || mu > 1.0)
            throw std::invalid_argument("mean_ratio_vs_chaos_curve: share outside [0, 1]");
        SurrogateOptions o = base;
        o.mix.regular = 1.0 - mu;
        o.mix.chaotic = {mu};
        double acc = 0.0;
        for (int s = 0; s < reps; ++s) {
            o.seed = base.seed + static_cast<std::uint64_t>(s);
            const auto r = surrogate_ratios(o);
            double sum = 0.0;
            for (const double x : r) sum += x;
            acc += sum / static_cast<double>(r.size());
        }
        curve.emplace_back(mu, acc / reps);
    }
    return curve;
}

}  // namespace dicke::stats
