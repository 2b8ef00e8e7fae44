// test_spectral.cpp - ratio laws, distribution tests, surrogate sequences
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "dicke/ratio_stats.hpp"
#include "dicke/surrogate.hpp"
#include "oracles.hpp"

using namespace dicke::stats;

TEST_CASE("integrable reference law") {
    // density integrates to one and reproduces the closed-form CDF 2r/(1+r)
    const double total = oracle::integrate(poisson_ratio_pdf, 0.0, 1.0, 400);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    for (double r : {0.1, 0.35, 0.5, 0.75, 0.99}) {
        const double by_quad = oracle::integrate(poisson_ratio_pdf, 0.0, r, 400);
        CHECK(poisson_ratio_cdf(r) == doctest::Approx(by_quad).epsilon(1e-12));
        CHECK(poisson_ratio_cdf(r) == doctest::Approx(2.0 * r / (1.0 + r)).epsilon(1e-14));
    }

    const double mean_quad =
        oracle::integrate([](double r) { return r * poisson_ratio_pdf(r); }, 0.0, 1.0, 400);
    CHECK(mean_quad == doctest::Approx(2.0 * std::numbers::ln2 - 1.0).epsilon(1e-12));
    CHECK(poisson_ratio_mean == doctest::Approx(0.38629436).epsilon(1e-7));
}

TEST_CASE("ensemble reference law") {
    // normalization pins the folded constant; the surmise mean is 4 - 2 sqrt(3)
    const double total = oracle::integrate(goe_ratio_pdf, 0.0, 1.0, 400);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));

    const double mean_quad =
        oracle::integrate([](double r) { return r * goe_ratio_pdf(r); }, 0.0, 1.0, 400);
    CHECK(mean_quad == doctest::Approx(4.0 - 2.0 * std::numbers::sqrt3).epsilon(1e-10));
    CHECK(goe_ratio_mean == doctest::Approx(0.53589838).epsilon(1e-7));

    CHECK(goe_ratio_cdf(0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(goe_ratio_cdf(1.0) == doctest::Approx(1.0).epsilon(1e-10));
    // the cdf table interpolates linearly between quadrature cells, so its
    // pointwise accuracy is a few 1e-8 absolute
    for (double r : {0.15, 0.4, 0.6, 0.85}) {
        const double by_quad = oracle::integrate(goe_ratio_pdf, 0.0, r, 400);
        CHECK(goe_ratio_cdf(r) == doctest::Approx(by_quad).epsilon(5e-6));
    }
    // the law sits below the integrable one near zero: level repulsion
    CHECK(goe_ratio_pdf(0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(goe_ratio_pdf(0.01) < poisson_ratio_pdf(0.01));
}

TEST_CASE("gap folding") {
    const std::vector<double> lv{0.0, 1.0, 3.0, 4.0};
    const auto r = fold_ratios(lv);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(0.5));
    CHECK(r[1] == doctest::Approx(0.5));

    // order of the input does not matter, nor does an affine map
    std::vector<double> shuffled{3.0, 0.0, 4.0, 1.0};
    CHECK(fold_ratios(shuffled) == r);
    std::vector<double> affine;
    for (double x : lv) affine.push_back(-2.5 * x + 7.0);
    const auto ra = fold_ratios(affine);
    REQUIRE(ra.size() == r.size());
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(ra[i] == doctest::Approx(r[i]).epsilon(1e-12));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(0.0, 10.0);
    std::vector<double> random_levels(200);
    for (double& x : random_levels) x = uni(rng);
    for (double v : fold_ratios(random_levels)) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("degeneracy-guarded folding") {
    // one near-degenerate pair: its gap disappears from the sequence
    const std::vector<double> lv{0.0, 1.0, 1.0 + 1e-15, 2.0, 3.0};
    const auto guarded = fold_ratios_guarded(lv, 1e-12);
    CHECK(guarded.degenerate == 1);
    REQUIRE(guarded.ratios.size() == 2);
    CHECK(guarded.ratios[0] == doctest::Approx(1.0));
    CHECK(guarded.ratios[1] == doctest::Approx(1.0));

    // zero floor keeps everything that fold_ratios keeps
    const std::vector<double> clean{0.0, 0.5, 1.7, 2.0, 4.0};
    const auto a = fold_ratios_guarded(clean, 0.0);
    CHECK(a.degenerate == 0);
    CHECK(a.ratios == fold_ratios(clean));
}

TEST_CASE("distribution statistic separates the laws") {
    // quantile-exact samples of the integrable law score tiny
    const int n = 2000;
    std::vector<double> samples(n);
    for (int i = 0; i < n; ++i) {
        const double u = (i + 0.5) / n;
        samples[i] = u / (2.0 - u);  // inverse of 2r/(1+r)
    }
    CHECK(anderson_darling(samples, poisson_ratio_cdf) < 1.0);

    // the same samples against the ensemble law are far off
    CHECK(anderson_darling(samples, goe_ratio_cdf) > 25.0);
}

TEST_CASE("empirical curve interpolates the sample quantiles") {
    EmpiricalCdf cdf({0.2, 0.4, 0.6, 0.8});
    CHECK(cdf(0.0) == doctest::Approx(0.0));
    CHECK(cdf(1.0) == doctest::Approx(1.0));
    CHECK(cdf(0.2) == doctest::Approx(0.125));
    CHECK(cdf(0.4) == doctest::Approx(0.375));
    CHECK(cdf(0.3) == doctest::Approx(0.25));
    double prev = -1.0;
    for (int i = 0; i <= 50; ++i) {
        const double v = cdf(i / 50.0);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("building blocks of the surrogate sequence") {
    const auto goe = goe_unfolded_block(500, 3);
    REQUIRE(goe.size() > 300);
    CHECK(std::is_sorted(goe.begin(), goe.end()));
    const double span = goe.back() - goe.front();
    CHECK(span / (goe.size() - 1.0) == doctest::Approx(1.0).epsilon(0.1));

    const auto poi = poisson_block(3000, 4);
    REQUIRE(poi.size() == 3000);
    CHECK(std::is_sorted(poi.begin(), poi.end()));
    CHECK(poi.back() / (poi.size() - 1.0) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("surrogate sequences are deterministic in the seed") {
    SurrogateOptions o;
    o.n_levels = 5000;
    o.mix = {0.4, {0.6}};
    o.seed = 11;
    const auto a = surrogate_levels(o);
    const auto b = surrogate_levels(o);
    CHECK(a == b);
    o.seed = 12;
    const auto c = surrogate_levels(o);
    CHECK(a != c);
    REQUIRE(static_cast<int>(a.size()) >= o.n_levels);
    CHECK(std::is_sorted(a.begin(), a.end()));
}

TEST_CASE("mixture shares are validated") {
    SurrogateOptions o;
    o.n_levels = 1000;
    o.mix = {0.5, {0.2, 0.2}};
    CHECK_THROWS_AS(surrogate_levels(o), std::invalid_argument);
    o.mix = {-0.1, {1.1}};
    CHECK_THROWS_AS(surrogate_levels(o), std::invalid_argument);
    o.mix = {0.6, {0.2, 0.2}};
    CHECK_NOTHROW(surrogate_levels(o));
}

TEST_CASE("surrogate ratio mean rises with the chaotic weight") {
    const auto mean_at = [](double mu) {
        double s = 0.0;
        for (std::uint64_t seed = 1; seed <= 8; ++seed) {
            SurrogateOptions o;
            o.n_levels = 30000;
            o.mix = {1.0 - mu, {mu}};
            o.seed = seed;
            s += mean(surrogate_ratios(o));
        }
        return s / 8.0;
    };
    const double m0 = mean_at(0.0);
    const double m3 = mean_at(0.3);
    const double m6 = mean_at(0.6);
    const double m1 = mean_at(1.0);
    CHECK(std::abs(m0 - poisson_ratio_mean) <= 0.008);
    CHECK(std::abs(m1 - goe_ratio_mean) <= 0.008);
    CHECK(m0 < m3);
    CHECK(m3 < m6);
    CHECK(m6 < m1);
}

TEST_CASE("splitting one chaotic share lowers the mean ratio") {
    // two superposed ensemble streams repel within themselves only, so the
    // split mixture sits between the pure ensemble and Poisson means
    const auto mean_of = [](const MixtureSpec& mix) {
        double s = 0.0;
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            SurrogateOptions o;
            o.n_levels = 30000;
            o.mix = mix;
            o.seed = seed;
            s += mean(surrogate_ratios(o));
        }
        return s / 6.0;
    };
    const double one = mean_of({0.0, {1.0}});
    const double two = mean_of({0.0, {0.5, 0.5}});
    CHECK(two < one - 0.01);
    CHECK(two > poisson_ratio_mean);
}

TEST_CASE("mean ratio curve spans the two limits monotonically") {
    SurrogateOptions base;
    base.n_levels = 20000;
    base.seed = 5;
    const auto curve = mean_ratio_vs_chaos_curve({0.0, 0.25, 0.5, 0.75, 1.0}, base, 6);
    REQUIRE(curve.size() == 5);
    CHECK(curve.front().second == doctest::Approx(poisson_ratio_mean).epsilon(0.03));
    CHECK(curve.back().second == doctest::Approx(goe_ratio_mean).epsilon(0.03));
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].second > curve[i - 1].second);
}
