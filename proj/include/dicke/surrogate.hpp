// surrogate.hpp - reference level sequences assembled from random-matrix blocks
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace dicke::stats {

// unfolded bulk of one random symmetric-ensemble block: tridiagonal sampling,
// semicircle unfolding to unit mean gap, 5% trimmed from each edge
std::vector<double> goe_unfolded_block(int n, std::uint64_t seed);

// iid exponential gaps with unit mean, cumulated from zero
std::vector<double> poisson_block(int n, std::uint64_t seed);

struct MixtureSpec {
    double regular{0.0};               // Poisson density share
    std::vector<double> chaotic{1.0};  // one independent ensemble sequence per entry

    void validate() const;  // shares nonnegative and summing to one
};

struct SurrogateOptions {
    int n_levels{100000};
    int block{500};  // ensemble block size before trimming
    MixtureSpec mix{};
    std::uint64_t seed{1};
};

// superposition sequence: a Poisson stream at the regular density plus one
// independent ensemble stream per chaotic share, merged at unit total density
std::vector<double> surrogate_levels(const SurrogateOptions& opts);

// folded consecutive-gap ratios of such a sequence
std::vector<double> surrogate_ratios(const SurrogateOptions& opts);

// surrogate mean ratio along a chaotic-share sweep with a single chaotic
// component; each point averages `reps` seeds, endpoints approach the Poisson
// and ensemble constants
std::vector<std::pair<double, double>> mean_ratio_vs_chaos_curve(
    const std::vector<double>& mu_grid, const SurrogateOptions& base = {}, int reps = 1);

}  // namespace dicke::stats
