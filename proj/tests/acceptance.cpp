// acceptance.cpp - end-to-end gate: one binary, one criterion per invocation
//
// Usage: dicke_acceptance <prepare|1..10>
//
// "prepare" builds the shared desk-scale artifacts (classical maps, windowed
// spectra, coherent-field tables) under acceptance_out/; the numbered runs
// each check one published-scale property and print a single [PASS]/[FAIL]
// line. Finished solves are cached, so re-running prepare is cheap.
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "dicke/classical.hpp"
#include "dicke/config.hpp"
#include "dicke/eigensolve.hpp"
#include "dicke/mixed.hpp"
#include "dicke/pipeline.hpp"
#include "dicke/ratio_stats.hpp"
#include "dicke/surrogate.hpp"

using namespace dicke;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string fmt(const char* spec, double x) {
    char b[64];
    std::snprintf(b, sizeof b, spec, x);
    return b;
}

int pass(int k, const std::string& msg) {
    std::cout << "[PASS] criterion " << k << ": " << msg << "\n";
    return 0;
}

int fail(int k, const std::string& msg) {
    std::cout << "[FAIL] criterion " << k << ": " << msg << "\n";
    return 1;
}

// ---------------------------------------------------------------- configs --

RunConfig f1_config() {
    RunConfig c = preset_config("one-photon-paper");
    c.out_dir = "acceptance_out/f1";
    c.grid_n = 101;          // 0.04-wide cells resolve the component weights
    c.lyapunov_time = 2000;  // the automatic threshold is 0.005 from T = 2000 up
    c.ode_tol = 1e-10;
    return c;
}

RunConfig f2_config() {
    RunConfig c = preset_config("two-photon-paper");
    c.out_dir = "acceptance_out/f2";
    c.grid_n = 101;
    c.lyapunov_time = 2000;
    c.ode_tol = 1e-10;
    return c;
}

const std::vector<double> small_js{20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30};
const std::vector<double> large_js{49, 50, 51};

// --------------------------------------------------------------- helpers --

// guarded fold per (spin, sector), pooled afterwards; levels never pool
std::vector<double> pooled_ratios(const RunConfig& cfg, const std::vector<double>& js,
                                  const EpsWindow& w) {
    std::vector<double> out;
    for (const double j : js) {
        const EigenSolution sol = obtain_spectrum(cfg, j, w, false);
        const double lo = (w.center - w.half_width) * j;
        const double hi = (w.center + w.half_width) * j;
        const double floor_gap = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
        for (const auto& sec : sol.sectors) {
            auto folded =
                stats::fold_ratios_guarded(converged_levels(sol, sec.label, lo, hi), floor_gap);
            out.insert(out.end(), folded.ratios.begin(), folded.ratios.end());
        }
    }
    return out;
}

struct MTable {
    double j{0.0};
    std::vector<double> moments;
    std::vector<std::vector<double>> m;  // m[state][moment]
    std::vector<double> l1, l2;
    std::vector<int> converged;
};

std::string mtable_path(const RunConfig& cfg, double j) {
    char w[64];
    std::snprintf(w, sizeof w, "w%+.3f_h%.3f", cfg.analysis.center, cfg.analysis.half_width);
    char jj[32];
    std::snprintf(jj, sizeof jj, "%g", j);
    return cfg.out_dir + "/cache/mtable_f" + std::to_string(cfg.model.f) + "_j" + jj + "_" + w +
           ".json";
}

MTable load_mtable(const RunConfig& cfg, double j) {
    const std::string path = mtable_path(cfg, j);
    std::ifstream is(path);
    if (!is) throw std::runtime_error("missing measure table " + path + "; run prepare first");
    const json mt = json::parse(is);
    MTable t;
    t.j = mt.at("j").get<double>();
    t.moments = mt.at("moments").get<std::vector<double>>();
    t.m = mt.at("m").get<std::vector<std::vector<double>>>();
    t.l1 = mt.at("l1").get<std::vector<double>>();
    t.l2 = mt.at("l2").get<std::vector<double>>();
    t.converged = mt.at("converged").get<std::vector<int>>();
    return t;
}

std::size_t moment_index(const MTable& t, double nu) {
    for (std::size_t q = 0; q < t.moments.size(); ++q)
        if (t.moments[q] == nu) return q;
    throw std::runtime_error("measure table lacks moment " + fmt("%g", nu));
}

std::vector<double> moment_column(const MTable& t, double nu) {
    const std::size_t q = moment_index(t, nu);
    std::vector<double> out;
    out.reserve(t.m.size());
    for (const auto& row : t.m) out.push_back(row.at(q));
    return out;
}

// pooled mixed fraction of one member group at one moment
double pooled_eta(const RunConfig& cfg, const std::vector<double>& js, double nu) {
    std::vector<double> pooled;
    for (const double j : js) {
        const auto col = moment_column(load_mtable(cfg, j), nu);
        pooled.insert(pooled.end(), col.begin(), col.end());
    }
    return mixed_fraction(pooled, cfg.bands);
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

// ---------------------------------------------------------------- prepare --

struct StepClock {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    void done(const std::string& what) {
        const auto dt = std::chrono::duration_cast<std::chrono::seconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
        std::cerr << "[prepare] " << what << " (" << dt << " s)\n";
        t0 = std::chrono::steady_clock::now();
    }
};

int prepare() {
    StepClock clock;
    const RunConfig f1 = f1_config();
    const RunConfig f2 = f2_config();

    obtain_grid(f1, 0.0, true);
    clock.done("one-photon classical map at eps 0");
    obtain_grid(f2, 1.0, true);
    clock.done("two-photon classical map at eps 1");

    for (const double j : small_js) obtain_spectrum(f1, j, f1.analysis, true);
    clock.done("one-photon small-spin spectra");
    for (const double j : large_js) {
        obtain_spectrum(f1, j, f1.analysis, true);
        obtain_spectrum(f1, j, {-0.9, 0.1}, true);
    }
    clock.done("one-photon large-spin spectra");

    {
        // the high window is the heavy solve: fixed suggested truncation, the
        // per-state conversion tails still certify convergence
        RunConfig big = f1;
        ModelParams pj = big.model;
        big.truncation = suggest_truncation(pj, big.basis, 3.1);
        obtain_spectrum(big, 50, {3.0, 0.1}, true);
        clock.done("one-photon high-energy window");
    }

    for (const double j : small_js) obtain_spectrum(f2, j, f2.analysis, true);
    clock.done("two-photon small-spin spectra");
    for (const double j : large_js) {
        RunConfig wide = f2;
        ModelParams pj = wide.model;
        pj.j = j;
        wide.truncation = suggest_truncation(pj, wide.basis, 1.1);
        // one solve covers both the statistics window and the analysis window
        obtain_spectrum(wide, j, {1.0, 0.1}, true);
    }
    clock.done("two-photon large-spin spectra");

    run_pipeline(f1, Stage::husimi, true);
    clock.done("one-photon coherent-field tables");
    run_pipeline(f2, Stage::husimi, true);
    clock.done("two-photon coherent-field tables");

    run_pipeline(f1, Stage::mixed, true);
    run_pipeline(f2, Stage::mixed, true);
    clock.done("scaling fits");

    std::cout << "[PASS] prepare: shared artifacts ready under acceptance_out/\n";
    return 0;
}

// --------------------------------------------------------------- criteria --

// free-limit spectra are exact level sums
int c1() {
    double worst = 0.0;
    for (int f : {1, 2})
        for (double j : {0.5, 1.0, 2.5, 5.0, 10.0}) {
            ModelParams p{1.0, f == 1 ? 1.0 : 2.0, 0.0, j, f};
            const int n_max = 40;
            SolveOptions o;
            o.truncation = n_max;
            o.full_vectors = true;
            const EigenSolution sol = solve_spectrum(p, o);
            std::vector<double> got;
            for (const auto& sec : sol.sectors)
                got.insert(got.end(), sec.energies.data(),
                           sec.energies.data() + sec.energies.size());
            std::sort(got.begin(), got.end());
            std::vector<double> want;
            for (int n = 0; n <= n_max; ++n)
                for (int mu = 0; mu < p.n_spin(); ++mu)
                    want.push_back(p.omega * n + p.omega0 * p.m_z(mu));
            std::sort(want.begin(), want.end());
            if (got.size() != want.size())
                return fail(1, "level count mismatch in the free limit");
            for (std::size_t i = 0; i < got.size(); ++i)
                worst = std::max(worst, std::abs(got[i] - want[i]));
        }
    if (worst > 1e-10) return fail(1, "free-limit deviation " + fmt("%.2e", worst));
    return pass(1, "uncoupled spectra match the analytic levels (worst " + fmt("%.2e", worst) + ")");
}

// pure surrogate sequences land on the two reference means
int c2() {
    stats::SurrogateOptions o;
    o.n_levels = 100000;
    o.seed = 1;
    o.chaotic_weight = 1.0;
    const double m_goe = stats::mean(stats::surrogate_ratios(o));
    o.chaotic_weight = 0.0;
    const double m_poi = stats::mean(stats::surrogate_ratios(o));
    const double d_goe = std::abs(m_goe - stats::goe_ratio_mean);
    const double d_poi = std::abs(m_poi - stats::poisson_ratio_mean);
    if (d_goe > 0.005 || d_poi > 0.005)
        return fail(2, "pure means " + fmt("%.4f", m_goe) + " / " + fmt("%.4f", m_poi) +
                           " miss the references");
    return pass(2, "pure-sequence ratio means " + fmt("%.4f", m_goe) + " and " +
                       fmt("%.4f", m_poi) + " within 0.005 of the laws");
}

// low-energy one-photon window follows the integrable law
int c3() {
    const RunConfig f1 = f1_config();
    const auto ratios = pooled_ratios(f1, large_js, {-0.9, 0.1});
    if (ratios.size() < 100) return fail(3, "only " + std::to_string(ratios.size()) + " ratios");
    const double a2 = stats::anderson_darling(ratios, stats::poisson_ratio_cdf);
    if (a2 > 2.5)
        return fail(3, "A2 " + fmt("%.2f", a2) + " against the integrable law (n = " +
                           std::to_string(ratios.size()) + ")");
    return pass(3, "low window ratios fit the integrable law, A2 = " + fmt("%.2f", a2) +
                       " over " + std::to_string(ratios.size()) + " ratios");
}

// high-energy one-photon window follows the ensemble law
int c4() {
    const RunConfig f1 = f1_config();
    const auto ratios = pooled_ratios(f1, {50}, {3.0, 0.1});
    if (ratios.size() < 100) return fail(4, "only " + std::to_string(ratios.size()) + " ratios");
    const double a2 = stats::anderson_darling(ratios, stats::goe_ratio_cdf);
    if (a2 > 2.5)
        return fail(4, "A2 " + fmt("%.2f", a2) + " against the ensemble law (n = " +
                           std::to_string(ratios.size()) + ")");
    return pass(4, "high window ratios fit the ensemble law, A2 = " + fmt("%.2f", a2) +
                       " over " + std::to_string(ratios.size()) + " ratios");
}

// chaotic fractions and component structure of the two maps
int c5() {
    const RunConfig f1 = f1_config(), f2 = f2_config();
    const auto g1 = obtain_grid(f1, 0.0, false);
    const auto g2 = obtain_grid(f2, 1.0, false);

    if (std::abs(g1.chaos_fraction - 0.87) > 0.05)
        return fail(5, "one-photon chaotic fraction " + fmt("%.3f", g1.chaos_fraction));
    if (std::abs(g2.chaos_fraction - 0.84) > 0.05)
        return fail(5, "two-photon chaotic fraction " + fmt("%.3f", g2.chaos_fraction));

    std::vector<double> chaotic1, chaotic2;
    for (const auto& c : classical::grid_components(g1))
        if (c.kind == classical::CellStatus::chaotic) chaotic1.push_back(c.weight);
    for (const auto& c : classical::grid_components(g2))
        if (c.kind == classical::CellStatus::chaotic) chaotic2.push_back(c.weight);

    if (chaotic1.size() < 2 || std::abs(chaotic1[0] - 0.70) > 0.05 ||
        std::abs(chaotic1[1] - 0.17) > 0.05)
        return fail(5, "one-photon chaotic components " +
                           (chaotic1.empty() ? std::string("absent")
                                             : fmt("%.3f", chaotic1[0]) + " / " +
                                                   (chaotic1.size() > 1 ? fmt("%.3f", chaotic1[1])
                                                                        : std::string("-"))));
    if (chaotic2.empty() || chaotic2[0] < 0.7 || (chaotic2.size() > 1 && chaotic2[1] > 0.05))
        return fail(5, "two-photon sea is not a single dominant component");

    return pass(5, "chaotic fractions " + fmt("%.3f", g1.chaos_fraction) + " / " +
                       fmt("%.3f", g2.chaos_fraction) + ", components " +
                       fmt("%.2f", chaotic1[0]) + "+" + fmt("%.2f", chaotic1[1]) +
                       " and a single sea " + fmt("%.2f", chaotic2[0]));
}

// two-photon ratios against the two-component surrogate at the measured weight
int c6() {
    const RunConfig f2 = f2_config();
    const auto grid = obtain_grid(f2, 1.0, false);
    const auto ratios = pooled_ratios(f2, {50}, {1.0, 0.1});
    if (ratios.size() < 100) return fail(6, "only " + std::to_string(ratios.size()) + " ratios");

    stats::SurrogateOptions o;
    o.n_levels = 100000;
    o.seed = 1;
    o.chaotic_weight = grid.chaos_fraction;
    const stats::EmpiricalCdf ref(stats::surrogate_ratios(o));
    const double a2 = stats::anderson_darling(ratios, [&](double x) { return ref(x); });
    if (a2 > 2.5)
        return fail(6, "A2 " + fmt("%.2f", a2) + " against the surrogate at weight " +
                           fmt("%.3f", grid.chaos_fraction));
    return pass(6, "window ratios fit the two-component surrogate (weight " +
                       fmt("%.3f", grid.chaos_fraction) + "), A2 = " + fmt("%.2f", a2));
}

// sign span of the first and fourth measure across the models
int c7() {
    const RunConfig f1 = f1_config(), f2 = f2_config();

    for (const RunConfig* cfg : {&f1, &f2}) {
        const auto m1 = moment_column(load_mtable(*cfg, 50), 1.0);
        const auto [lo, hi] = std::minmax_element(m1.begin(), m1.end());
        if (!(*lo < 0.0 && *hi > 0.0))
            return fail(7, "first measure does not span both signs at spin 50 (f = " +
                               std::to_string(cfg->model.f) + ")");
    }

    double lo2 = 2.0, hi2 = -2.0;
    for (const double j : small_js) {
        const auto col = moment_column(load_mtable(f2, j), 1.0);
        for (const double m : col) {
            lo2 = std::min(lo2, m);
            hi2 = std::max(hi2, m);
        }
    }
    if (!(lo2 <= -0.98 && hi2 >= 0.98))
        return fail(7, "two-photon small spins span [" + fmt("%.3f", lo2) + ", " +
                           fmt("%.3f", hi2) + "], expected nearly full");

    const auto t1 = load_mtable(f1, 50);
    const auto m1 = moment_column(t1, 1.0);
    const auto m4 = moment_column(t1, 4.0);
    const double min1 = *std::min_element(m1.begin(), m1.end());
    const double min4 = *std::min_element(m4.begin(), m4.end());
    if (!(min4 <= -0.95 && min1 > -0.95))
        return fail(7, "one-photon moment sharpening: min m1 " + fmt("%.3f", min1) +
                           ", min m4 " + fmt("%.3f", min4));

    return pass(7, "measures span both signs; small-spin span [" + fmt("%.2f", lo2) + ", " +
                       fmt("%.2f", hi2) + "]; sharpening min m1 " + fmt("%.2f", min1) +
                       " vs min m4 " + fmt("%.2f", min4));
}

// mixed fraction decays as a power of the spin size
int c8() {
    std::string note;
    for (const RunConfig& cfg : {f1_config(), f2_config()}) {
        const std::string fl = "f" + std::to_string(cfg.model.f);
        std::ifstream is(cfg.out_dir + "/mixed_fits.json");
        if (!is) return fail(8, "missing " + cfg.out_dir + "/mixed_fits.json; run prepare");
        const json fits = json::parse(is);

        for (const double nu : {1.0, 4.0}) {
            const json* entry = nullptr;
            for (const auto& e : fits)
                if (e.at("nu").get<double>() == nu) entry = &e;
            if (!entry) return fail(8, fl + ": no fit at moment " + fmt("%g", nu));
            const auto& ens = entry->at("ensembles");
            const double eta_small = ens.at(0).at("eta").get<double>();
            const double eta_large = ens.at(1).at("eta").get<double>();
            if (!(eta_small > eta_large))
                return fail(8, fl + " nu=" + fmt("%g", nu) + ": fraction " +
                                   fmt("%.3f", eta_small) + " -> " + fmt("%.3f", eta_large) +
                                   " does not decay");
            if (entry->at("xi").is_null()) return fail(8, fl + ": fit degenerate");
            const double xi = entry->at("xi").get<double>();
            if (xi < 0.05 || xi > 0.5)
                return fail(8, fl + " nu=" + fmt("%g", nu) + ": exponent " + fmt("%.3f", xi) +
                                   " outside [0.05, 0.5]");
            note += fl + " xi(" + fmt("%g", nu) + ")=" + fmt("%.2f", xi) + " ";
        }

        // scan over band choices at least one unit wide
        std::ifstream scan_is(cfg.out_dir + "/mixed_scan.csv");
        if (!scan_is) return fail(8, "missing " + cfg.out_dir + "/mixed_scan.csv");
        std::string line;
        std::getline(scan_is, line);  // header
        std::vector<double> xis;
        while (std::getline(scan_is, line)) {
            double nu, lo, hi, dm, xi;
            if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &nu, &lo, &hi, &dm, &xi) != 5)
                continue;
            if (nu == 1.0 && dm >= 1.0) xis.push_back(xi);
        }
        if (xis.size() < 10) return fail(8, fl + ": scan produced only " +
                                                std::to_string(xis.size()) + " usable bands");
        const double xi_bar = mean_of(xis);
        if (xi_bar < 0.2 || xi_bar > 0.35)
            return fail(8, fl + ": scan-averaged exponent " + fmt("%.3f", xi_bar) +
                               " outside [0.2, 0.35]");
        note += fl + " scan=" + fmt("%.2f", xi_bar) + " ";
    }

    if (std::getenv("DICKE_ACCEPT_J100") != nullptr) {
        // optional large-spin extension: add one spin-100 point to each fit
        for (const RunConfig& base : {f1_config(), f2_config()}) {
            RunConfig cfg = base;
            ModelParams pj = cfg.model;
            pj.j = 100.0;
            cfg.truncation = suggest_truncation(pj, cfg.basis, cfg.analysis.center +
                                                                   cfg.analysis.half_width);
            const EigenSolution sol = obtain_spectrum(cfg, 100.0, cfg.analysis, true);
            const auto grid = obtain_grid(cfg, cfg.model.f == 1 ? 0.0 : 1.0, false);
            const auto measures = window_measures(cfg, sol, grid, cfg.analysis);
            const auto refs = std::vector<double>{1.0, 4.0};
            const std::vector<double> want =
                cfg.model.f == 1 ? std::vector<double>{0.19, 0.26} : std::vector<double>{0.34, 0.27};
            for (std::size_t q = 0; q < refs.size(); ++q) {
                const double nu = refs[q];
                std::vector<double> ms;
                const std::size_t mi = [&] {
                    for (std::size_t t = 0; t < cfg.moments.size(); ++t)
                        if (cfg.moments[t] == nu) return t;
                    return std::size_t{0};
                }();
                for (const auto& st : measures) ms.push_back(st.m.at(mi));
                const double eta100 = mixed_fraction(ms, cfg.bands);
                std::vector<double> js{mean_of(small_js), mean_of(large_js), 100.0};
                std::vector<double> etas{pooled_eta(cfg, small_js, nu),
                                         pooled_eta(cfg, large_js, nu), eta100};
                const double xi = fit_power_law(js, etas).xi;
                if (std::abs(xi - want[q]) > 0.15)
                    return fail(8, "spin-100 exponent " + fmt("%.3f", xi) + " at nu " +
                                       fmt("%g", nu) + " (f = " +
                                       std::to_string(cfg.model.f) + ")");
            }
        }
        note += "spin-100 extension checked";
    } else {
        note += "(spin-100 extension skipped; set DICKE_ACCEPT_J100 to run it)";
    }
    return pass(8, note);
}

// cross-cutting regressions on the prepared artifacts
int c9() {
    const RunConfig f1 = f1_config(), f2 = f2_config();

    // every tabulated state converged
    for (const RunConfig* cfg : {&f1, &f2}) {
        std::vector<double> all = small_js;
        all.insert(all.end(), large_js.begin(), large_js.end());
        for (const double j : all) {
            const MTable t = load_mtable(*cfg, j);
            if (t.m.empty()) return fail(9, "empty measure table at spin " + fmt("%g", j));
            for (const int c : t.converged)
                if (!c) return fail(9, "unconverged state in table f" +
                                           std::to_string(cfg->model.f) + " j " + fmt("%g", j));
        }
    }

    // the most extended states reach the delocalized plateau and no further
    for (const RunConfig* cfg : {&f1, &f2}) {
        const MTable t = load_mtable(*cfg, 50);
        const double l2max = *std::max_element(t.l2.begin(), t.l2.end());
        if (l2max < 0.4 || l2max > 0.6)
            return fail(9, "peak occupation ratio " + fmt("%.3f", l2max) + " (f = " +
                               std::to_string(cfg->model.f) + ") outside [0.4, 0.6]");
    }

    // sharper moments shrink the mixed fraction
    for (const RunConfig* cfg : {&f1, &f2}) {
        const double e1 = pooled_eta(*cfg, large_js, 1.0);
        const double e4 = pooled_eta(*cfg, large_js, 4.0);
        if (!(e4 <= e1 + 1e-12))
            return fail(9, "mixed fraction grew with the moment order (f = " +
                               std::to_string(cfg->model.f) + "): " + fmt("%.3f", e1) + " -> " +
                               fmt("%.3f", e4));
    }

    // measures recomputed with four workers match the stored single-worker run
    {
        const EigenSolution sol = obtain_spectrum(f1, 20, f1.analysis, false);
        const auto grid = obtain_grid(f1, 0.0, false);
        RunConfig four = f1;
        four.workers = 4;
        const auto a = window_measures(f1, sol, grid, f1.analysis);
        const auto b = window_measures(four, sol, grid, f1.analysis);
        if (a.size() != b.size()) return fail(9, "worker count changed the state count");
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i].m != b[i].m || a[i].l1 != b[i].l1 || a[i].l2 != b[i].l2)
                return fail(9, "worker count changed a measure at state " + std::to_string(i));
        }
        const MTable t = load_mtable(f1, 20);
        if (t.m.size() != a.size()) return fail(9, "stored table size differs from recompute");
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t q = 0; q < a[i].m.size(); ++q)
                if (a[i].m[q] != t.m[i][q])
                    return fail(9, "stored measure differs from recompute at state " +
                                       std::to_string(i));
    }

    return pass(9, "tables converged, occupation plateau in range, moments sharpen, "
                   "workers interchangeable");
}

// the two bases produce the same converged one-photon spectra
int c10() {
    ModelParams p{1.0, 1.0, 0.5, 5.0, 1};
    const double lo = -1.07 * p.j, hi = 0.8 * p.j;

    SolveOptions of;
    of.kind = BasisKind::fock;
    of.truncation = 200;
    of.delta = 1e-8;
    of.full_vectors = true;
    const EigenSolution fock = solve_spectrum(p, of);

    SolveOptions od;
    od.kind = BasisKind::displaced;
    od.truncation = 60;
    od.delta = 1e-8;
    od.full_vectors = true;
    const EigenSolution disp = solve_spectrum(p, od);

    double worst = 0.0;
    long compared = 0;
    for (std::size_t s = 0; s < fock.sectors.size(); ++s) {
        const auto a = converged_levels(fock, static_cast<int>(s), lo, hi);
        const auto b = converged_levels(disp, static_cast<int>(s), lo, hi);
        if (a.size() != b.size())
            return fail(10, "sector " + std::to_string(s) + " counts " +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
        for (std::size_t i = 0; i < a.size(); ++i)
            worst = std::max(worst, std::abs(a[i] - b[i]));
        compared += static_cast<long>(a.size());
    }
    if (compared < 40) return fail(10, "only " + std::to_string(compared) + " levels compared");
    if (worst > 1e-8) return fail(10, "bases disagree by " + fmt("%.2e", worst));
    return pass(10, "bases agree to " + fmt("%.2e", worst) + " over " +
                        std::to_string(compared) + " levels");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: dicke_acceptance <prepare|1..10>\n";
        return 2;
    }
    const std::string cmd = argv[1];
    try {
        if (cmd == "prepare") return prepare();
        const int k = std::stoi(cmd);
        switch (k) {
            case 1: return c1();
            case 2: return c2();
            case 3: return c3();
            case 4: return c4();
            case 5: return c5();
            case 6: return c6();
            case 7: return c7();
            case 8: return c8();
            case 9: return c9();
            case 10: return c10();
            default: break;
        }
        std::cerr << "unknown criterion " << cmd << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cout << "[FAIL] " << cmd << ": " << e.what() << "\n";
        return 1;
    }
}
