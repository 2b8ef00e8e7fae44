// chaos_map.cpp - grid classification and patch extraction
#include "dicke/chaos_map.hpp"

#include <atomic>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace dicke::classical {

ClassicalityGrid classicality_grid(const ModelParams& p, double eps, const GridOptions& opts) {
    p.validate();
    if (opts.n < 2) throw std::invalid_argument("classicality_grid: need at least 2 points");
    ClassicalityGrid g;
    g.params = p;
    g.eps = eps;
    g.n = opts.n;
    g.span = opts.span;
    g.t_end = opts.t_end;
    g.threshold = opts.lambda_threshold > 0.0 ? opts.lambda_threshold
                                              : std::max(10.0 / opts.t_end, 0.005);
    g.lambda = Eigen::MatrixXd::Constant(opts.n, opts.n, -1.0);
    g.status.setConstant(opts.n, opts.n, static_cast<std::uint8_t>(CellStatus::outside));

    const auto classify_row = [&](int i) {
        const double Q = g.coord(i);
        for (int k = 0; k < opts.n; ++k) {
            const double P = g.coord(k);
            if (theta(Q, P) < 1e-6) continue;
            const double q0 = q_plus(p, eps, Q, P);
            if (std::isnan(q0)) continue;
            const auto r = max_lyapunov(p, State(q0, 0.0, Q, P), opts.t_end, opts.ode,
                                        opts.renorm_dt, opts.lambda_threshold);
            if (r.escaped) continue;
            g.lambda(i, k) = r.lambda;
            g.status(i, k) = static_cast<std::uint8_t>(r.chaotic ? CellStatus::chaotic
                                                                 : CellStatus::regular);
        }
    };

    const int workers = std::max(1, opts.workers);
    if (workers == 1) {
        for (int i = 0; i < opts.n; ++i) classify_row(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < opts.n; i = next.fetch_add(1))
                    classify_row(i);
            });
        for (auto& th : pool) th.join();
    }

    // the fraction is microcanonical: each cell counts with its shell weight
    double accessible = 0.0, chaotic = 0.0;
    for (int i = 0; i < opts.n; ++i)
        for (int k = 0; k < opts.n; ++k) {
            if (g.at(i, k) == CellStatus::outside) continue;
            const double w = shell_weight(p, eps, g.coord(i), g.coord(k));
            accessible += w;
            if (g.at(i, k) == CellStatus::chaotic) chaotic += w;
        }
    g.chaos_fraction = accessible > 0.0 ? chaotic / accessible : 0.0;
    return g;
}

std::vector<GridComponent> grid_components(const ClassicalityGrid& g, Eigen::MatrixXi* labels) {
    const int n = g.n;
    Eigen::MatrixXi lab = Eigen::MatrixXi::Constant(n, n, -1);
    const auto cell_weight = [&](int i, int k) {
        return shell_weight(g.params, g.eps, g.coord(i), g.coord(k));
    };
    double accessible = 0.0;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            if (g.at(i, k) != CellStatus::outside) accessible += cell_weight(i, k);
    std::vector<GridComponent> out;
    if (accessible <= 0.0) {
        if (labels) *labels = lab;
        return out;
    }

    std::vector<std::pair<int, int>> stack;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (lab(i, k) >= 0 || g.at(i, k) == CellStatus::outside) continue;
            const CellStatus kind = g.at(i, k);
            const int id = static_cast<int>(out.size());
            double patch = 0.0;
            stack.assign(1, {i, k});
            lab(i, k) = id;
            while (!stack.empty()) {
                const auto [a, b] = stack.back();
                stack.pop_back();
                patch += cell_weight(a, b);
                const int da[4] = {1, -1, 0, 0};
                const int db[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    const int na = a + da[d], nb = b + db[d];
                    if (na < 0 || nb < 0 || na >= n || nb >= n) continue;
                    if (lab(na, nb) >= 0 || g.at(na, nb) != kind) continue;
                    lab(na, nb) = id;
                    stack.push_back({na, nb});
                }
            }
            out.push_back({kind, patch / accessible});
        }

    // report patches heaviest first; cell labels follow the sorted order
    std::vector<int> order(out.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return out[a].weight > out[b].weight; });
    std::vector<GridComponent> sorted;
    sorted.reserve(out.size());
    std::vector<int> rank(out.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        rank[order[i]] = static_cast<int>(i);
        sorted.push_back(out[order[i]]);
    }
    if (labels) {
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                if (lab(i, k) >= 0) lab(i, k) = rank[lab(i, k)];
        *labels = lab;
    }
    return sorted;
}

namespace {

constexpr std::uint32_t grid_magic = 0x444b4348;  // "HCKD", bumped with the layout

template <class T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
void get(std::ifstream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw std::runtime_error("grid snapshot: truncated file");
}

}  // namespace

void save_grid(const std::string& path, const ClassicalityGrid& g) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("grid snapshot: cannot open " + path + " for writing");
    put(os, grid_magic);
    put(os, g.params.omega);
    put(os, g.params.omega0);
    put(os, g.params.gamma);
    put(os, g.params.j);
    put(os, static_cast<std::uint8_t>(g.params.f));
    put(os, g.eps);
    put(os, static_cast<std::int32_t>(g.n));
    put(os, g.span);
    put(os, g.t_end);
    put(os, g.threshold);
    put(os, g.chaos_fraction);
    os.write(reinterpret_cast<const char*>(g.lambda.data()),
             static_cast<std::streamsize>(sizeof(double)) * g.n * g.n);
    os.write(reinterpret_cast<const char*>(g.status.data()),
             static_cast<std::streamsize>(g.n) * g.n);
    if (!os) throw std::runtime_error("grid snapshot: write failed for " + path);
}

ClassicalityGrid load_grid(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("grid snapshot: cannot open " + path);
    std::uint32_t magic = 0;
    get(is, magic);
    if (magic != grid_magic)
        throw std::runtime_error("grid snapshot: " + path + " is not a grid file");
    ClassicalityGrid g;
    std::uint8_t f = 0;
    std::int32_t n = 0;
    get(is, g.params.omega);
    get(is, g.params.omega0);
    get(is, g.params.gamma);
    get(is, g.params.j);
    get(is, f);
    g.params.f = f;
    get(is, g.eps);
    get(is, n);
    if (n < 2) throw std::runtime_error("grid snapshot: bad grid size in " + path);
    g.n = n;
    get(is, g.span);
    get(is, g.t_end);
    get(is, g.threshold);
    get(is, g.chaos_fraction);
    g.lambda.resize(n, n);
    g.status.resize(n, n);
    is.read(reinterpret_cast<char*>(g.lambda.data()),
            static_cast<std::streamsize>(sizeof(double)) * n * n);
    is.read(reinterpret_cast<char*>(g.status.data()), static_cast<std::streamsize>(n) * n);
    if (!is) throw std::runtime_error("grid snapshot: truncated file");
    return g;
}

}  // namespace dicke::classical
