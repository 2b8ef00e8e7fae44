// pipeline.cpp - stage runners, artifact writers, manifest bookkeeping
#include "dicke/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include "dicke/cache.hpp"
#include "dicke/digest.hpp"
#include "dicke/husimi.hpp"
#include "dicke/ratio_stats.hpp"
#include "dicke/surrogate.hpp"
#include "dicke/trajectory.hpp"

namespace dicke {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string num(double x) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", x);
    return b;
}

std::string fixed3(double x, bool forced_sign) {
    char b[48];
    std::snprintf(b, sizeof b, forced_sign ? "%+.3f" : "%.3f", x);
    return b;
}

std::string gform(double x) {
    char b[40];
    std::snprintf(b, sizeof b, "%g", x);
    return b;
}

std::string wtag(const EpsWindow& w) {
    return "w" + fixed3(w.center, true) + "_h" + fixed3(w.half_width, false);
}

std::string spectrum_cache_rel(const RunConfig& c, double j, const EpsWindow& w) {
    return "cache/spectrum_f" + std::to_string(c.model.f) + "_j" + gform(j) + "_" + wtag(w) +
           ".bin";
}

std::string grid_cache_rel(const RunConfig& c, double eps) {
    return "cache/grid_f" + std::to_string(c.model.f) + "_e" + fixed3(eps, true) + ".bin";
}

std::string mtable_rel(const RunConfig& c, double j) {
    return "cache/mtable_f" + std::to_string(c.model.f) + "_j" + gform(j) + "_" +
           wtag(c.analysis) + ".json";
}

// index-space work sharing; results must land in caller-owned disjoint slots
// so the artifact bytes cannot depend on the worker count
void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex gate;
    std::exception_ptr err;
    std::vector<std::thread> pool;
    const int nw = std::min(workers, n);
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> hold(gate);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

// collects the files one stage produced, keyed by path relative to the run
// directory, each with its content digest
class StageLog {
  public:
    explicit StageLog(std::string root) : root_(std::move(root)) {}

    void write_text(const std::string& rel, const std::string& text) {
        const fs::path path = fs::path(root_) / rel;
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("pipeline: cannot write " + path.string());
        os << text;
        if (!os.flush()) throw std::runtime_error("pipeline: write failed for " + path.string());
        files_[rel] = hex64(fnv1a(text));
    }

    void note_file(const std::string& rel) {
        files_[rel] = hex64(file_digest((fs::path(root_) / rel).string()));
    }

    const std::map<std::string, std::string>& files() const { return files_; }

  private:
    std::string root_;
    std::map<std::string, std::string> files_;
};

std::string canonical_digest(const RunConfig& cfg) {
    RunConfig c = cfg;  // artifacts must not depend on scheduling or placement
    c.workers = 1;
    c.out_dir = "";
    return hex64(fnv1a(dump_config(c)));
}

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::spectrum: return "spectrum";
        case Stage::classical: return "classical";
        case Stage::stats: return "stats";
        case Stage::husimi: return "husimi";
        case Stage::mixed: return "mixed";
        case Stage::all: return "all";
    }
    return "?";
}

class Manifest {
  public:
    static Manifest open(const RunConfig& cfg) {
        Manifest m;
        m.dir_ = cfg.out_dir;
        const std::string digest = canonical_digest(cfg);
        const fs::path path = fs::path(cfg.out_dir) / "manifest.json";
        if (fs::exists(path)) {
            try {
                std::ifstream is(path);
                json old = json::parse(is);
                if (old.value("config_digest", "") == digest &&
                    old.value("tool_version", "") == tool_version) {
                    m.root_ = std::move(old);
                }
            } catch (const json::exception&) {
                // unreadable manifest: start over
            }
        }
        m.root_["tool_version"] = tool_version;
        m.root_["config_digest"] = digest;
        m.root_["config"] = json::parse(dump_config(cfg));
        if (!m.root_.contains("stages")) m.root_["stages"] = json::object();
        if (!m.root_.contains("files")) m.root_["files"] = json::object();
        return m;
    }

    // a stage counts as current when it completed under this configuration and
    // every file it recorded still digests to the recorded value
    bool stage_current(const std::string& name) const {
        const auto& stages = root_.at("stages");
        if (!stages.contains(name)) return false;
        const json& st = stages.at(name);
        if (!st.value("completed", false)) return false;
        const auto& files = root_.at("files");
        for (const auto& rel : st.at("artifacts")) {
            const std::string r = rel.get<std::string>();
            if (!files.contains(r)) return false;
            const fs::path path = fs::path(dir_) / r;
            std::error_code ec;
            if (!fs::exists(path, ec)) return false;
            try {
                if (hex64(file_digest(path.string())) != files.at(r).get<std::string>())
                    return false;
            } catch (const std::exception&) {
                return false;
            }
        }
        return true;
    }

    void record_stage(const std::string& name, long wall_ms, const StageLog& log) {
        json arts = json::array();
        for (const auto& [rel, digest] : log.files()) {
            arts.push_back(rel);
            root_["files"][rel] = digest;
        }
        root_["stages"][name] = {
            {"completed", true}, {"wall_ms", wall_ms}, {"artifacts", std::move(arts)}};
    }

    void save() const {
        const fs::path path = fs::path(dir_) / "manifest.json";
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("pipeline: cannot write " + path.string());
        os << root_.dump(2) << '\n';
    }

  private:
    std::string dir_;
    json root_;
};

classical::IntegrateOptions ode_options(const RunConfig& cfg) {
    classical::IntegrateOptions io;
    io.abs_tol = cfg.ode_tol;
    io.rel_tol = cfg.ode_tol;
    return io;
}

// every (spin size, window) pair the spectrum stage must cover: the analysis
// window for the main spin and all ensemble members, extra windows for the
// main spin only
std::vector<std::pair<double, EpsWindow>> solve_plan(const RunConfig& cfg) {
    std::vector<std::pair<double, EpsWindow>> plan;
    const auto push = [&plan](double j, const EpsWindow& w) {
        for (const auto& [pj, pw] : plan)
            if (pj == j && pw.center == w.center && pw.half_width == w.half_width) return;
        plan.emplace_back(j, w);
    };
    push(cfg.model.j, cfg.analysis);
    for (const auto& w : cfg.extra_windows) push(cfg.model.j, w);
    for (const auto& members : cfg.ensembles)
        for (double j : members) push(j, cfg.analysis);
    return plan;
}

std::vector<EpsWindow> stats_windows(const RunConfig& cfg) {
    std::vector<EpsWindow> ws{cfg.analysis};
    for (const auto& w : cfg.extra_windows) {
        bool seen = false;
        for (const auto& v : ws)
            if (v.center == w.center && v.half_width == w.half_width) seen = true;
        if (!seen) ws.push_back(w);
    }
    std::sort(ws.begin(), ws.end(), [](const EpsWindow& a, const EpsWindow& b) {
        return a.center != b.center ? a.center < b.center : a.half_width < b.half_width;
    });
    return ws;
}

std::vector<double> husimi_members(const RunConfig& cfg) {
    std::set<double> set{cfg.model.j};
    for (const auto& members : cfg.ensembles) set.insert(members.begin(), members.end());
    return {set.begin(), set.end()};
}

double powv(double v, double nu) {
    const int whole = static_cast<int>(nu);
    if (std::abs(nu - whole) < 1e-12) {
        double w = 1.0;
        for (int k = 0; k < whole; ++k) w *= v;
        return w;
    }
    return std::pow(v, nu);
}

// ---------------------------------------------------------------- stages --

void stage_spectrum(const RunConfig& cfg, StageLog& log) {
    for (const auto& [j, w] : solve_plan(cfg)) {
        const EigenSolution sol = obtain_spectrum(cfg, j, w, true);
        // a wider cached window may have served this one without writing the
        // exact-name file; only note what exists
        const std::string rel = spectrum_cache_rel(cfg, j, w);
        if (fs::exists(fs::path(cfg.out_dir) / rel)) log.note_file(rel);

        struct Row {
            double e;
            int parity;
            bool conv;
        };
        std::vector<Row> rows;
        for (const auto& sec : sol.sectors)
            for (int c = 0; c < sec.vectors.cols(); ++c) {
                const int i = sec.vec_first + c;
                rows.push_back({sec.energies[i], sec.label, sec.converged[c] != 0});
            }
        std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
            return a.e != b.e ? a.e < b.e : a.parity < b.parity;
        });
        std::ostringstream csv;
        csv << "k,energy,eps,parity,converged\n";
        for (std::size_t k = 0; k < rows.size(); ++k)
            csv << k << ',' << num(rows[k].e) << ',' << num(rows[k].e / j) << ','
                << rows[k].parity << ',' << (rows[k].conv ? 1 : 0) << '\n';
        log.write_text("spectrum_f" + std::to_string(cfg.model.f) + "_j" + gform(j) + "_" +
                           wtag(w) + ".csv",
                       csv.str());
    }
}

void stage_classical(const RunConfig& cfg, StageLog& log) {
    for (const double eps : cfg.grid_eps) {
        const classical::ClassicalityGrid g = obtain_grid(cfg, eps, true);
        log.note_file(grid_cache_rel(cfg, eps));
        const std::string tag =
            "_f" + std::to_string(cfg.model.f) + "_e" + fixed3(eps, true);

        Eigen::MatrixXi labels;
        const auto comps = classical::grid_components(g, &labels);

        std::ostringstream csv;
        csv << "# eps=" << num(g.eps) << " omega=" << num(g.params.omega)
            << " omega0=" << num(g.params.omega0) << " gamma=" << num(g.params.gamma)
            << " f=" << g.params.f << " t_end=" << num(g.t_end)
            << " lambda_thr=" << num(g.threshold) << " n=" << g.n << " span=" << num(g.span)
            << '\n';
        csv << "Q,P,accessible,lambda,chi,component_id,weight\n";
        for (int i = 0; i < g.n; ++i)
            for (int k = 0; k < g.n; ++k) {
                const auto st = g.at(i, k);
                const bool in = st != classical::CellStatus::outside;
                const int chi = !in ? 0 : (st == classical::CellStatus::chaotic ? 1 : -1);
                const double w =
                    in ? classical::shell_weight(g.params, g.eps, g.coord(i), g.coord(k)) : 0.0;
                csv << num(g.coord(i)) << ',' << num(g.coord(k)) << ',' << (in ? 1 : 0) << ','
                    << num(g.lambda(i, k)) << ',' << chi << ',' << labels(i, k) << ',' << num(w)
                    << '\n';
            }
        log.write_text("classical" + tag + ".csv", csv.str());
        json comp_list = json::array();
        for (std::size_t i = 0; i < comps.size() && i < 12; ++i)
            comp_list.push_back(
                {{"kind",
                  comps[i].kind == classical::CellStatus::chaotic ? "chaotic" : "regular"},
                 {"weight", comps[i].weight}});
        const json summary = {{"epsilon", eps},
                              {"threshold", g.threshold},
                              {"mu_c", g.chaos_fraction},
                              {"components", comp_list}};
        log.write_text("classical" + tag + ".json", summary.dump(2) + "\n");

        if (cfg.poincare_orbits > 0) {
            std::vector<std::pair<double, double>> cells;
            for (int i = 0; i < g.n; ++i)
                for (int k = 0; k < g.n; ++k)
                    if (g.at(i, k) != classical::CellStatus::outside)
                        cells.emplace_back(g.coord(i), g.coord(k));
            std::ostringstream sec;
            sec << "orbit_id,crossing_index,Q,P\n";
            if (!cells.empty()) {
                const auto io = ode_options(cfg);
                const int n_orb = std::min<int>(cfg.poincare_orbits,
                                                static_cast<int>(cells.size()));
                for (int o = 0; o < n_orb; ++o) {
                    const auto [Q, P] =
                        cells[(2 * o + 1) * cells.size() / (2 * n_orb)];
                    const double q0 = classical::q_plus(cfg.model, eps, Q, P);
                    if (std::isnan(q0)) continue;
                    const auto marks = classical::poincare_section(
                        cfg.model, classical::State(q0, 0.0, Q, P), cfg.poincare_time, 4000, io);
                    for (std::size_t c = 0; c < marks.size(); ++c)
                        sec << o << ',' << c << ',' << num(marks[c][0]) << ',' << num(marks[c][1])
                            << '\n';
                }
            }
            log.write_text("poincare" + tag + ".csv", sec.str());
        }
    }
}

void stage_stats(const RunConfig& cfg, StageLog& log) {
    const double jj = cfg.model.j;
    std::ostringstream profile;
    profile << "center,half_width,n,mean_r,r_c\n";
    for (const EpsWindow& w : stats_windows(cfg)) {
        const EigenSolution sol = obtain_spectrum(cfg, jj, w, false);
        const double e_lo = (w.center - w.half_width) * jj;
        const double e_hi = (w.center + w.half_width) * jj;
        const double floor_gap = 1e-12 * std::max({1.0, std::abs(e_lo), std::abs(e_hi)});

        // ratios fold per sector; sectors only pool after folding
        std::vector<double> ratios;
        long degenerate = 0, levels_total = 0;
        for (const auto& sec : sol.sectors) {
            auto levels = converged_levels(sol, sec.label, e_lo, e_hi);
            levels_total += static_cast<long>(levels.size());
            auto folded = stats::fold_ratios_guarded(std::move(levels), floor_gap);
            degenerate += folded.degenerate;
            ratios.insert(ratios.end(), folded.ratios.begin(), folded.ratios.end());
        }
        const double degenerate_share =
            degenerate / std::max(1.0, static_cast<double>(levels_total - 1));
        if (degenerate_share > 1e-3)
            std::cerr << "[stats] window " << wtag(w) << ": " << degenerate
                      << " near-degenerate spacings dropped (" << num(degenerate_share * 100)
                      << "% of the window)\n";

        const std::string tag =
            "_f" + std::to_string(cfg.model.f) + "_j" + gform(jj) + "_" + wtag(w);
        json stats_json = {{"window", {{"center", w.center}, {"half_width", w.half_width}}},
                           {"n", ratios.size()},
                           {"levels", levels_total},
                           {"degenerate_dropped", degenerate},
                           {"degeneracy_warning", degenerate_share > 1e-3}};
        if (ratios.size() < 20) {
            std::cerr << "[stats] window " << wtag(w) << " has only " << ratios.size()
                      << " ratios; skipped\n";
            stats_json["skipped"] = true;
            log.write_text("stats" + tag + ".json", stats_json.dump(2) + "\n");
            continue;
        }
        stats_json["skipped"] = false;

        const double mean_r = stats::mean(ratios);
        const double r_c = (mean_r - stats::poisson_ratio_mean) /
                           (stats::goe_ratio_mean - stats::poisson_ratio_mean);
        stats_json["mean_r"] = mean_r;
        stats_json["r_c"] = r_c;
        stats_json["A2_poisson"] = stats::anderson_darling(ratios, stats::poisson_ratio_cdf);
        stats_json["A2_goe"] = stats::anderson_darling(ratios, stats::goe_ratio_cdf);

        // surrogate comparison only when a matching classical map exists
        stats_json["A2_surrogate"] = nullptr;
        stats_json["surrogate_mu"] = nullptr;
        double best = std::numeric_limits<double>::infinity();
        double eps_near = 0.0;
        for (const double eps : cfg.grid_eps)
            if (std::abs(eps - w.center) < best) {
                best = std::abs(eps - w.center);
                eps_near = eps;
            }
        if (best <= w.half_width) {
            try {
                const auto g = obtain_grid(cfg, eps_near, false);
                stats::SurrogateOptions so;
                so.n_levels = static_cast<int>(cfg.surrogate_levels);
                so.mix = grid_mixture(g);
                so.seed = cfg.seed;
                const stats::EmpiricalCdf ref(stats::surrogate_ratios(so));
                stats_json["A2_surrogate"] = stats::anderson_darling(ratios, ref);
                stats_json["surrogate_mu"] = g.chaos_fraction;
                stats_json["surrogate_components"] = so.mix.chaotic;
            } catch (const DependencyError&) {
                // no grid yet: the comparison stays null
            }
        }
        log.write_text("stats" + tag + ".json", stats_json.dump(2) + "\n");

        std::ostringstream hist;
        hist << "bin_left,bin_right,count,density\n";
        const int nb = cfg.histogram_bins;
        std::vector<long> counts(nb, 0);
        for (const double r : ratios)
            ++counts[std::min(static_cast<int>(r * nb), nb - 1)];
        for (int b = 0; b < nb; ++b) {
            const double left = static_cast<double>(b) / nb;
            const double right = static_cast<double>(b + 1) / nb;
            const double density = counts[b] * nb / static_cast<double>(ratios.size());
            hist << num(left) << ',' << num(right) << ',' << counts[b] << ',' << num(density)
                 << '\n';
        }
        log.write_text("ratio_hist" + tag + ".csv", hist.str());

        profile << num(w.center) << ',' << num(w.half_width) << ',' << ratios.size() << ','
                << num(mean_r) << ',' << num(r_c) << '\n';
    }
    log.write_text("profile_f" + std::to_string(cfg.model.f) + "_j" + gform(jj) + ".csv",
                   profile.str());
}

void stage_husimi(const RunConfig& cfg, StageLog& log) {
    // nearest configured grid energy serves the whole analysis window
    double best = std::numeric_limits<double>::infinity();
    double eps_near = cfg.analysis.center;
    for (const double eps : cfg.grid_eps)
        if (std::abs(eps - cfg.analysis.center) < best) {
            best = std::abs(eps - cfg.analysis.center);
            eps_near = eps;
        }
    const classical::ClassicalityGrid grid = obtain_grid(cfg, eps_near, false);

    for (const double j : husimi_members(cfg)) {
        const EigenSolution sol = obtain_spectrum(cfg, j, cfg.analysis, false);
        const bool main_spin = j == cfg.model.j;
        std::vector<FieldExport> fields;
        const auto measures =
            window_measures(cfg, sol, grid, cfg.analysis, main_spin ? &fields : nullptr);

        const std::string tag =
            "_f" + std::to_string(cfg.model.f) + "_j" + gform(j) + "_" + wtag(cfg.analysis);
        std::ostringstream csv;
        csv << "k,eps,parity";
        for (const double nu : cfg.moments) csv << ",m" << gform(nu);
        csv << ",l1,l2,converged\n";
        for (const auto& st : measures) {
            csv << st.k << ',' << num(st.eps) << ',' << st.parity;
            for (const double m : st.m) csv << ',' << num(m);
            csv << ',' << num(st.l1) << ',' << num(st.l2) << ',' << (st.converged ? 1 : 0)
                << '\n';
        }
        log.write_text("husimi_states" + tag + ".csv", csv.str());

        json mt = {{"f", cfg.model.f},
                   {"j", j},
                   {"window",
                    {{"center", cfg.analysis.center}, {"half_width", cfg.analysis.half_width}}},
                   {"moments", cfg.moments}};
        json eps_list = json::array(), parity = json::array(), mrows = json::array(),
             l1 = json::array(), l2 = json::array(), conv = json::array();
        for (const auto& st : measures) {
            eps_list.push_back(st.eps);
            parity.push_back(st.parity);
            mrows.push_back(st.m);
            l1.push_back(st.l1);
            l2.push_back(st.l2);
            conv.push_back(st.converged);
        }
        mt["eps"] = std::move(eps_list);
        mt["parity"] = std::move(parity);
        mt["m"] = std::move(mrows);
        mt["l1"] = std::move(l1);
        mt["l2"] = std::move(l2);
        mt["converged"] = std::move(conv);
        if (main_spin && measures.size() >= 10) {
            // occupation ceiling of this window, for reading the L columns
            const RandomOccupation thr = window_thresholds(cfg, sol, grid, cfg.analysis);
            mt["thresholds"] = {{"l1", thr.l1},
                                {"l2", thr.l2},
                                {"l1_se", thr.l1_se},
                                {"l2_se", thr.l2_se},
                                {"draws", thr.draws}};
        }
        const std::string rel = mtable_rel(cfg, j);
        log.write_text(rel, mt.dump(2) + "\n");

        if (!main_spin) continue;
        const auto section = section_grid(grid);
        for (const auto& fld : fields) {
            const auto& st = measures[fld.k];
            for (std::size_t q = 0; q < cfg.moments.size(); ++q) {
                const double nu = cfg.moments[q];
                double total = 0.0;
                std::ostringstream map_csv;
                map_csv << "Q,P,value\n";
                for (std::size_t i = 0; i < fld.values.size(); ++i) {
                    const double v = powv(fld.values[i], nu);
                    total += v;
                    map_csv << num(section.pts[i].Q) << ',' << num(section.pts[i].P) << ','
                            << num(v) << '\n';
                }
                const std::string base = "field_f" + std::to_string(cfg.model.f) + "_j" +
                                         gform(j) + "_k" + std::to_string(fld.k) + "_nu" +
                                         gform(nu);
                log.write_text(base + ".csv", map_csv.str());
                const json side = {{"k", fld.k},       {"nu", nu},
                                   {"eps_k", st.eps},  {"M_nu", st.m[q]},
                                   {"L1", st.l1},      {"L2", st.l2},
                                   {"B_nu", total}};
                log.write_text(base + ".json", side.dump(2) + "\n");
            }
        }
    }
}

void stage_mixed(const RunConfig& cfg, StageLog& log) {
    if (cfg.ensembles.empty()) throw ConfigError("mixed: no ensembles configured");

    struct Member {
        double j{0.0};
        std::vector<std::vector<double>> m;  // m[state][moment]
    };
    std::vector<std::vector<Member>> groups;
    for (const auto& members : cfg.ensembles) {
        std::vector<Member> group;
        for (const double j : members) {
            const std::string rel = mtable_rel(cfg, j);
            const fs::path path = fs::path(cfg.out_dir) / rel;
            if (!fs::exists(path))
                throw DependencyError("mixed: missing husimi table " + rel +
                                      "; run the husimi stage first");
            json mt;
            try {
                std::ifstream is(path);
                mt = json::parse(is);
            } catch (const json::exception& e) {
                throw DependencyError("mixed: unreadable husimi table " + rel + ": " + e.what());
            }
            if (mt.value("f", 0) != cfg.model.f ||
                mt.at("moments").get<std::vector<double>>() != cfg.moments ||
                mt.at("window").value("center", 1e300) != cfg.analysis.center ||
                mt.at("window").value("half_width", 1e300) != cfg.analysis.half_width)
                throw DependencyError("mixed: husimi table " + rel +
                                      " belongs to another configuration; rerun the husimi "
                                      "stage");
            Member mem;
            mem.j = j;
            mem.m = mt.at("m").get<std::vector<std::vector<double>>>();
            group.push_back(std::move(mem));
        }
        groups.push_back(std::move(group));
    }

    const std::size_t nm = cfg.moments.size();
    std::ostringstream series;
    series << "nu,j,N_mixed,N_total,eta\n";
    json fits = json::array();
    std::ostringstream scan;
    scan << "nu,M_minus,M_plus,delta_M,xi\n";
    long scan_skipped = 0;

    std::vector<double> lo_grid, hi_grid;
    for (double lo = cfg.scan.lo_min; lo <= cfg.scan.lo_max + 1e-9; lo += cfg.scan.step)
        lo_grid.push_back(lo);
    for (double hi = cfg.scan.hi_min; hi <= cfg.scan.hi_max + 1e-9; hi += cfg.scan.step)
        hi_grid.push_back(hi);

    for (std::size_t q = 0; q < nm; ++q) {
        const double nu = cfg.moments[q];

        // per-member fractions, then ensembles pooled by concatenating states
        std::vector<double> j_mean, eta_pooled;
        for (const auto& group : groups) {
            double jsum = 0.0;
            std::vector<double> pooled;
            for (const auto& mem : group) {
                jsum += mem.j;
                std::vector<double> ms;
                ms.reserve(mem.m.size());
                for (const auto& row : mem.m) ms.push_back(row.at(q));
                long n_mixed = 0;
                for (const double m : ms)
                    if (classify_state(m, cfg.bands) == StateClass::mixed) ++n_mixed;
                const double eta =
                    ms.empty() ? 0.0 : static_cast<double>(n_mixed) / ms.size();
                series << gform(nu) << ',' << gform(mem.j) << ',' << n_mixed << ','
                       << ms.size() << ',' << num(eta) << '\n';
                pooled.insert(pooled.end(), ms.begin(), ms.end());
            }
            j_mean.push_back(jsum / group.size());
            eta_pooled.push_back(pooled.empty() ? 0.0 : mixed_fraction(pooled, cfg.bands));
        }

        std::vector<double> fit_j, fit_eta;
        for (std::size_t g = 0; g < groups.size(); ++g)
            if (eta_pooled[g] > 0.0) {
                fit_j.push_back(j_mean[g]);
                fit_eta.push_back(eta_pooled[g]);
            }
        json entry = {{"nu", nu}, {"points_used", fit_j.size()}};
        if (fit_j.size() >= 2) {
            const PowerLaw fit = fit_power_law(fit_j, fit_eta);
            entry["A"] = fit.amplitude;
            entry["xi"] = fit.xi;
            entry["residual"] = fit.residual;
        } else {
            entry["A"] = nullptr;
            entry["xi"] = nullptr;
            entry["residual"] = nullptr;
        }
        json pooled_list = json::array();
        for (std::size_t g = 0; g < groups.size(); ++g)
            pooled_list.push_back({{"j", j_mean[g]}, {"eta", eta_pooled[g]}});
        entry["ensembles"] = std::move(pooled_list);
        fits.push_back(std::move(entry));

        if (groups.size() < 2) continue;
        for (const double lo : lo_grid)
            for (const double hi : hi_grid) {
                if (hi - lo < cfg.scan.min_width - 1e-9) continue;
                const ClassifyBands bands{lo, hi};
                std::vector<double> js, etas;
                for (const auto& group : groups) {
                    double jsum = 0.0;
                    std::vector<double> pooled;
                    for (const auto& mem : group) {
                        jsum += mem.j;
                        for (const auto& row : mem.m) pooled.push_back(row.at(q));
                    }
                    const double eta = pooled.empty() ? 0.0 : mixed_fraction(pooled, bands);
                    if (eta > 0.0) {
                        js.push_back(jsum / group.size());
                        etas.push_back(eta);
                    }
                }
                // a band needs three nonzero fractions for a residual-bearing
                // fit, or every configured ensemble when fewer exist
                if (js.size() < std::min<std::size_t>(3, groups.size())) {
                    ++scan_skipped;
                    continue;
                }
                scan << gform(nu) << ',' << num(lo) << ',' << num(hi) << ',' << num(hi - lo)
                     << ',' << num(fit_power_law(js, etas).xi) << '\n';
            }
    }
    if (scan_skipped > 0)
        std::cerr << "[mixed] scan: " << scan_skipped
                  << " band choices skipped (too few nonzero mixed fractions)\n";

    log.write_text("mixed_series.csv", series.str());
    log.write_text("mixed_fits.json", fits.dump(2) + "\n");
    log.write_text("mixed_scan.csv", scan.str());
}

}  // namespace

Stage parse_stage(const std::string& name) {
    if (name == "spectrum") return Stage::spectrum;
    if (name == "classical") return Stage::classical;
    if (name == "stats") return Stage::stats;
    if (name == "husimi") return Stage::husimi;
    if (name == "mixed") return Stage::mixed;
    if (name == "all") return Stage::all;
    throw ConfigError("pipeline: unknown stage \"" + name + "\"");
}

EigenSolution obtain_spectrum(const RunConfig& cfg, double j, const EpsWindow& w,
                              bool allow_solve) {
    ModelParams pj = cfg.model;
    pj.j = j;
    const double e_lo = (w.center - w.half_width) * j;
    const double e_hi = (w.center + w.half_width) * j;
    fs::create_directories(fs::path(cfg.out_dir) / "cache");
    const std::string rel = spectrum_cache_rel(cfg, j, w);
    const std::string path = (fs::path(cfg.out_dir) / rel).string();

    const auto covers = [&](const EigenSolution& sol) {
        for (const auto& sec : sol.sectors)
            if (sec.vec_lo > e_lo || sec.vec_hi < e_hi) return false;
        return true;
    };
    if (cache_matches(path, pj, cfg.basis, cfg.delta)) {
        EigenSolution sol = load_solution(path);
        if (covers(sol)) return sol;
    }
    // a wider window already solved for this spin serves a narrower lookup;
    // scan in name order so reuse is deterministic
    const std::string prefix = "spectrum_f" + std::to_string(cfg.model.f) + "_j" + gform(j) + "_";
    std::vector<std::string> others;
    for (const auto& entry : fs::directory_iterator(fs::path(cfg.out_dir) / "cache")) {
        const std::string name = entry.path().filename().string();
        if (name.rfind(prefix, 0) == 0 && name != fs::path(rel).filename().string())
            others.push_back(entry.path().string());
    }
    std::sort(others.begin(), others.end());
    for (const std::string& other : others) {
        if (!cache_matches(other, pj, cfg.basis, cfg.delta)) continue;
        EigenSolution sol = load_solution(other);
        if (covers(sol)) return sol;
    }
    if (!allow_solve)
        throw DependencyError("pipeline: missing spectrum cache " + rel +
                              "; run the spectrum stage first");

    SolveOptions o;
    o.kind = cfg.basis;
    o.truncation = cfg.truncation;
    o.growth = cfg.growth;
    o.delta = cfg.delta;
    o.full_vectors = false;
    const double pad = 1e-7 * std::max({1.0, std::abs(e_lo), std::abs(e_hi)});
    o.e_lo = e_lo - pad;
    o.e_hi = e_hi + pad;
    EigenSolution sol = solve_spectrum(pj, o);
    save_solution(path, sol);
    return sol;
}

classical::ClassicalityGrid obtain_grid(const RunConfig& cfg, double eps, bool allow_solve) {
    fs::create_directories(fs::path(cfg.out_dir) / "cache");
    const std::string rel = grid_cache_rel(cfg, eps);
    const std::string path = (fs::path(cfg.out_dir) / rel).string();
    const double threshold = cfg.lambda_threshold > 0.0
                                 ? cfg.lambda_threshold
                                 : std::max(10.0 / cfg.lyapunov_time, 0.005);
    if (fs::exists(path)) {
        try {
            classical::ClassicalityGrid g = classical::load_grid(path);
            if (g.params.omega == cfg.model.omega && g.params.omega0 == cfg.model.omega0 &&
                g.params.gamma == cfg.model.gamma && g.params.f == cfg.model.f &&
                g.eps == eps && g.n == cfg.grid_n && g.span == cfg.grid_span &&
                g.t_end == cfg.lyapunov_time && g.threshold == threshold)
                return g;
        } catch (const std::runtime_error&) {
            // damaged snapshot: rebuild below
        }
    }
    if (!allow_solve)
        throw DependencyError("pipeline: missing classical map " + rel +
                              "; run the classical stage first");

    const double ground = classical::ground_energy(cfg.model);
    if (eps < ground - 1e-12)
        throw ConfigError("classical: energy " + num(eps) +
                          " lies below the accessible minimum " + num(ground));
    classical::GridOptions go;
    go.n = cfg.grid_n;
    go.span = cfg.grid_span;
    go.t_end = cfg.lyapunov_time;
    go.renorm_dt = cfg.renorm_dt;
    go.lambda_threshold = cfg.lambda_threshold;
    go.workers = cfg.workers;
    go.ode = ode_options(cfg);
    classical::ClassicalityGrid g = classical::classicality_grid(cfg.model, eps, go);
    classical::save_grid(path, g);
    return g;
}

namespace {

// photon representation of a window state set; the cutoff grows until the
// conversion closes for every member
std::vector<Eigen::MatrixXd> window_fock_matrices(const RunConfig& cfg, const EigenSolution& sol,
                                                  const std::vector<StateRef>& refs,
                                                  const EpsWindow& w, int& nf_out) {
    const int ns = static_cast<int>(refs.size());
    int nf = sol.basis.kind == BasisKind::fock
                 ? sol.basis.truncation
                 : suggest_truncation(sol.params, BasisKind::fock, w.center + w.half_width);
    std::vector<Eigen::MatrixXd> cmat(ns);
    for (int attempt = 0;; ++attempt) {
        std::vector<double> tails(ns, 0.0);
        parallel_for(ns, cfg.workers, [&](int s) {
            cmat[s] = fock_matrix(sol, refs[s], nf);
            tails[s] = fock_conversion_tail(cmat[s]);
        });
        const double worst =
            ns == 0 ? 0.0 : *std::max_element(tails.begin(), tails.end());
        if (worst <= 10.0 * sol.delta) break;
        if (attempt == 2)
            throw std::runtime_error("husimi: photon conversion does not close at cutoff " +
                                     std::to_string(nf));
        nf = static_cast<int>(std::ceil(nf * 1.5));
    }
    nf_out = nf;
    return cmat;
}

}  // namespace

stats::MixtureSpec grid_mixture(const classical::ClassicalityGrid& g) {
    stats::MixtureSpec mix;
    mix.chaotic.clear();
    double total = 0.0;
    for (const auto& c : classical::grid_components(g))
        if (c.kind == classical::CellStatus::chaotic) {
            mix.chaotic.push_back(c.weight);
            total += c.weight;
        }
    mix.regular = std::max(0.0, 1.0 - total);
    return mix;
}

std::vector<StateMeasures> window_measures(const RunConfig& cfg, const EigenSolution& sol,
                                           const classical::ClassicalityGrid& grid,
                                           const EpsWindow& w,
                                           std::vector<FieldExport>* fields) {
    const ModelParams& pj = sol.params;
    if (grid.params.omega != pj.omega || grid.params.omega0 != pj.omega0 ||
        grid.params.gamma != pj.gamma || grid.params.f != pj.f)
        throw ConfigError("husimi: the classical map was built for different couplings");
    if (std::abs(grid.eps - w.center) > w.half_width + 1e-12)
        throw ConfigError("husimi: map energy " + num(grid.eps) +
                          " sits outside the analysis window around " + num(w.center));

    const double e_lo = (w.center - w.half_width) * pj.j;
    const double e_hi = (w.center + w.half_width) * pj.j;
    const auto refs = converged_states(sol, e_lo, e_hi);
    const int ns = static_cast<int>(refs.size());
    std::vector<StateMeasures> out(ns);
    if (fields) fields->clear();
    if (ns == 0) return out;

    const SectionGrid section = section_grid(grid);
    if (section.pts.empty())
        throw std::runtime_error("husimi: the classical map has no accessible cells");

    int nf = 0;
    const std::vector<Eigen::MatrixXd> cmat = window_fock_matrices(cfg, sol, refs, w, nf);

    const std::size_t nm = cfg.moments.size();
    std::vector<std::vector<double>> mtop(ns, std::vector<double>(nm, 0.0));
    std::vector<std::vector<double>> mtot(ns, std::vector<double>(nm, 0.0));
    std::vector<double> occ1(ns, 0.0), occ2(ns, 0.0), occ_log(ns, 0.0);

    std::vector<int> field_slot(ns, -1);
    if (fields) {
        for (const int k : cfg.field_states)
            if (k < ns && field_slot[k] < 0) {
                field_slot[k] = static_cast<int>(fields->size());
                fields->push_back({k, {}});
                fields->back().values.reserve(section.pts.size());
            }
    }

    // both sweeps stream the points in fixed chunks; every state accumulates in
    // chunk order, so the totals cannot depend on the worker count
    const auto sweep = [&](const std::vector<PhasePoint>& pts, bool is_section) {
        const std::size_t chunk = 8192;
        for (std::size_t base = 0; base < pts.size(); base += chunk) {
            const std::size_t nb = std::min(chunk, pts.size() - base);
            const std::vector<PhasePoint> sub(pts.begin() + base, pts.begin() + base + nb);
            const CoherentTables tables = coherent_tables(pj.j, nf, sub);
            parallel_for(ns, cfg.workers, [&](int s) {
                const Eigen::VectorXd vals = husimi_values(cmat[s], tables);
                if (is_section) {
                    for (std::size_t i = 0; i < nb; ++i) {
                        const double v = vals[static_cast<long>(i)];
                        const bool hot = section.chaotic[base + i] != 0;
                        for (std::size_t q = 0; q < nm; ++q) {
                            const double pw = powv(v, cfg.moments[q]);
                            mtot[s][q] += pw;
                            if (hot) mtop[s][q] += pw;
                        }
                    }
                    if (field_slot[s] >= 0) {
                        auto& dst = (*fields)[field_slot[s]].values;
                        dst.insert(dst.end(), vals.data(), vals.data() + nb);
                    }
                } else {
                    for (std::size_t i = 0; i < nb; ++i) {
                        const double wg = pts[base + i].wgt;
                        const double v = vals[static_cast<long>(i)];
                        occ1[s] += wg * v;
                        occ2[s] += wg * v * v;
                        if (v > 0.0) occ_log[s] += wg * v * std::log(v);
                    }
                }
            });
        }
    };

    sweep(section.pts, true);
    const auto shell =
        sample_shell(pj, grid.eps, cfg.grid_n, cfg.grid_span, cfg.shell_per_cell, cfg.seed);
    if (shell.empty()) throw std::runtime_error("husimi: the energy shell has no interior");
    double vol = 0.0;
    for (const auto& pt : shell) vol += pt.wgt;
    sweep(shell, false);

    for (int s = 0; s < ns; ++s) {
        StateMeasures& st = out[s];
        st.k = s;
        st.eps = energy_of(sol, refs[s]) / pj.j;
        st.parity = sol.sectors[refs[s].sector].label;
        st.converged = true;
        st.m.resize(nm);
        for (std::size_t q = 0; q < nm; ++q) {
            if (!(mtot[s][q] > 0.0))
                throw std::runtime_error("husimi: field moment vanished on the section");
            st.m[q] = 2.0 * mtop[s][q] / mtot[s][q] - 1.0;
        }
        if (!(vol > 0.0) || !(occ1[s] > 0.0) || !(occ2[s] > 0.0))
            throw std::runtime_error("husimi: degenerate shell occupation");
        // same ratios as shell_occupation, assembled from the streamed sums
        st.l2 = occ1[s] * occ1[s] / (vol * occ2[s]);
        st.l1 = occ1[s] / vol * std::exp(-occ_log[s] / occ1[s]);
    }
    return out;
}

RandomOccupation window_thresholds(const RunConfig& cfg, const EigenSolution& sol,
                                   const classical::ClassicalityGrid& grid, const EpsWindow& w,
                                   int ensemble_size) {
    const ModelParams& pj = sol.params;
    const double e_lo = (w.center - w.half_width) * pj.j;
    const double e_hi = (w.center + w.half_width) * pj.j;
    const auto refs = converged_states(sol, e_lo, e_hi);
    int nf = 0;
    const auto cmat = window_fock_matrices(cfg, sol, refs, w, nf);
    const auto shell =
        sample_shell(pj, grid.eps, cfg.grid_n, cfg.grid_span, cfg.shell_per_cell, cfg.seed);
    return delocalization_thresholds(cmat, pj.j, nf, shell, ensemble_size, cfg.seed);
}

void run_pipeline(const RunConfig& cfg0, Stage stage, bool resume) {
    RunConfig cfg = cfg0;
    cfg.validate();
    if (cfg.grid_eps.empty()) cfg.grid_eps = {cfg.analysis.center};
    fs::create_directories(fs::path(cfg.out_dir) / "cache");
    Manifest manifest = Manifest::open(cfg);

    std::vector<Stage> order;
    if (stage == Stage::all)
        order = {Stage::spectrum, Stage::classical, Stage::stats, Stage::husimi, Stage::mixed};
    else
        order = {stage};

    for (const Stage s : order) {
        const std::string name = stage_name(s);
        if (resume && manifest.stage_current(name)) {
            std::cerr << "[skip] " << name << ": artifacts are up to date\n";
            continue;
        }
        StageLog log(cfg.out_dir);
        const auto t0 = std::chrono::steady_clock::now();
        switch (s) {
            case Stage::spectrum: stage_spectrum(cfg, log); break;
            case Stage::classical: stage_classical(cfg, log); break;
            case Stage::stats: stage_stats(cfg, log); break;
            case Stage::husimi: stage_husimi(cfg, log); break;
            case Stage::mixed: stage_mixed(cfg, log); break;
            case Stage::all: break;
        }
        const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        manifest.record_stage(name, static_cast<long>(wall), log);
        manifest.save();
        std::cerr << "[done] " << name << " (" << wall << " ms)\n";
    }
}

}  // namespace dicke
