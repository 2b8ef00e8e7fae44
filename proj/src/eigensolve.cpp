// eigensolve.cpp - LAPACK backends and the sector spectrum driver
#include "dicke/eigensolve.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "dicke/lapack.hpp"

namespace dicke::lapack {

namespace {

void check_info(int info, const char* who) {
    if (info != 0)
        throw std::runtime_error(std::string(who) + ": lapack info " + std::to_string(info));
}

}  // namespace

EigAll eig_all(Eigen::MatrixXd a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eig_all: matrix not square");
    const int n = static_cast<int>(a.rows());
    EigAll out;
    out.values.resize(n);
    if (n == 0) {
        out.vectors.resize(0, 0);
        return out;
    }
    check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, out.values.data()),
               "eig_all");
    out.vectors = std::move(a);
    return out;
}

Eigen::VectorXd eig_values(Eigen::MatrixXd a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eig_values: matrix not square");
    const int n = static_cast<int>(a.rows());
    Eigen::VectorXd w(n);
    if (n == 0) return w;
    check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data()),
               "eig_values");
    return w;
}

EigWindow eig_window(Eigen::MatrixXd a, double lo, double hi) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eig_window: matrix not square");
    if (!(lo < hi)) throw std::invalid_argument("eig_window: empty interval");
    const int n = static_cast<int>(a.rows());
    EigWindow out;
    if (n == 0) {
        out.values.resize(0);
        out.vectors.resize(0, 0);
        return out;
    }

    // Householder reduction to tridiagonal form; reflectors stay in a
    Eigen::VectorXd d(n), e(std::max(n - 1, 1)), tau(std::max(n - 1, 1));
    check_info(LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', n, a.data(), n, d.data(), e.data(),
                              tau.data()),
               "eig_window/sytrd");

    // full spectrum from the band alone
    out.values = d;
    Eigen::VectorXd e_scratch = e;
    check_info(LAPACKE_dsterf(n, out.values.data(), e_scratch.data()), "eig_window/sterf");

    // MRRR vectors for the requested slice; allocation sized from the count
    // above with slack for boundary jitter between the two algorithms
    int expect = 0;
    for (int i = 0; i < n; ++i)
        if (out.values[i] > lo && out.values[i] <= hi) ++expect;
    const int nzc = std::min(n, expect + 64);
    Eigen::VectorXd d2 = d, e2(n), w(n);
    e2.head(n - 1) = e.head(std::max(n - 1, 0));
    Eigen::MatrixXd z(n, std::max(nzc, 1));
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(std::max(nzc, 1)));
    lapack_logical tryrac = 1;
    lapack_int m = 0;
    check_info(LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'V', n, d2.data(), e2.data(), lo, hi, 0, 0,
                              &m, w.data(), z.data(), n, nzc, isuppz.data(), &tryrac),
               "eig_window/stemr");
    if (m == 0) {
        out.vectors.resize(n, 0);
        out.first = 0;
        return out;
    }

    // back-transform the band vectors to the original frame
    check_info(LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'L', 'N', n, m, a.data(), n, tau.data(),
                              z.data(), n),
               "eig_window/ormtr");
    out.vectors = z.leftCols(m);

    // locate the slice inside the full list
    const double scale = std::max(1.0, out.values.cwiseAbs().maxCoeff());
    const double* base = out.values.data();
    int first = static_cast<int>(std::lower_bound(base, base + n, w[0] - 1e-7 * scale) - base);
    int best = -1;
    double best_err = std::numeric_limits<double>::infinity();
    const int probe = std::min<int>(m, 6);
    for (int c = std::max(0, first - 3); c <= std::min(n - m, first + 3); ++c) {
        double err = 0.0;
        for (int k = 0; k < probe; ++k) err += std::abs(out.values[c + k] - w[k]);
        if (err < best_err) {
            best_err = err;
            best = c;
        }
    }
    if (best < 0 || best_err > 1e-6 * scale * probe)
        throw std::runtime_error("eig_window: could not align the vector slice to the spectrum");
    out.first = best;
    return out;
}

TridiagEig eig_tridiag(Eigen::VectorXd diag, Eigen::VectorXd off) {
    const int n = static_cast<int>(diag.size());
    if (off.size() != std::max<long>(n - 1, 0))
        throw std::invalid_argument("eig_tridiag: off-diagonal length mismatch");
    TridiagEig out;
    out.values = std::move(diag);
    out.vectors = Eigen::MatrixXd::Identity(n, n);
    if (n <= 1) return out;
    check_info(LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', n, out.values.data(), off.data(),
                             out.vectors.data(), n),
               "eig_tridiag");
    return out;
}

Eigen::VectorXd eig_tridiag_values(Eigen::VectorXd diag, Eigen::VectorXd off) {
    const int n = static_cast<int>(diag.size());
    if (off.size() != std::max<long>(n - 1, 0))
        throw std::invalid_argument("eig_tridiag_values: off-diagonal length mismatch");
    if (n <= 1) return diag;
    check_info(LAPACKE_dsterf(n, diag.data(), off.data()), "eig_tridiag_values");
    return diag;
}

}  // namespace dicke::lapack

namespace dicke {

namespace {

// Largest boson action per spin on the energy shell, scanned over the Bloch
// disk radius. Bounds the photon (or shifted-quantum) ladder an eigenstate
// below eps_top can reach.
double classical_boson_ceiling(const ModelParams& p, BasisKind kind, double eps_top) {
    const double w = p.omega, w0 = p.omega0, g = p.gamma;
    double best = 0.0;
    const int steps = 2001;
    for (int i = 0; i < steps; ++i) {
        const double rho2 = 4.0 * i / (steps - 1.0);
        const double u = rho2 * (1.0 - 0.25 * rho2);  // peak of (Q Theta)^2 at this radius
        const double k = eps_top + w0 - 0.5 * w0 * rho2;
        if (kind == BasisKind::displaced) {
            best = std::max(best, (k + 2.0 * g * g * u / w) / w);
        } else if (p.f == 1) {
            const double disc = 4.0 * g * g * u + 2.0 * w * k;
            if (disc < 0.0) continue;
            const double s = (2.0 * g * std::sqrt(u) + std::sqrt(disc)) / w;
            best = std::max(best, 0.5 * s * s);
        } else {
            if (k <= 0.0) continue;
            const double soft = 0.5 * w - g * std::sqrt(u);  // positive while gamma < omega/2
            best = std::max(best, 0.5 * k / soft);
        }
    }
    return best;
}

struct RawSector {
    int label{0};
    Eigen::MatrixXd h;
    SectorBasis fock;
    std::vector<DisplacedSymState> sym;
};

std::vector<RawSector> build_blocks(const ModelParams& p, BasisKind kind, int trunc,
                                    std::shared_ptr<const DisplacedFrame>& frame) {
    std::vector<RawSector> out;
    if (kind == BasisKind::fock) {
        for (auto& blk : build_fock_blocks(p, trunc)) {
            RawSector r;
            r.label = blk.basis.label;
            r.h = std::move(blk.h);
            r.fock = std::move(blk.basis);
            out.push_back(std::move(r));
        }
    } else {
        auto secs = build_displaced_blocks(p, trunc);
        frame = secs.front().frame;
        for (auto& s : secs) {
            RawSector r;
            r.label = s.label;
            r.h = std::move(s.h);
            r.sym = std::move(s.states);
            out.push_back(std::move(r));
        }
    }
    return out;
}

SectorSolution solve_block(RawSector blk, BasisKind kind, int trunc, const SolveOptions& o) {
    SectorSolution out;
    out.label = blk.label;
    const int dim = static_cast<int>(blk.h.rows());
    // the reduction works on a dense copy plus a comparable amount of scratch
    const double need = 9.0 * static_cast<double>(dim) * dim;
    if (need > 4.2e9)
        throw std::runtime_error(
            "solve_block: sector dimension " + std::to_string(dim) +
            " needs about " + std::to_string(static_cast<long>(need / 1e9) + 1) +
            " GB; lower the window top, the truncation, or the spin size");
    std::vector<int> edge;  // rows carrying the last boson slice
    for (int i = 0; i < dim; ++i) {
        const int b = kind == BasisKind::fock ? blk.fock.states[i].n : blk.sym[i].M;
        if (b == trunc) edge.push_back(i);
    }
    if (o.full_vectors) {
        auto eg = lapack::eig_all(std::move(blk.h));
        out.energies = std::move(eg.values);
        out.vectors = std::move(eg.vectors);
        out.vec_first = 0;
    } else {
        auto ew = lapack::eig_window(std::move(blk.h), o.e_lo, o.e_hi);
        out.energies = std::move(ew.values);
        out.vectors = std::move(ew.vectors);
        out.vec_first = ew.first;
        out.vec_lo = o.e_lo;
        out.vec_hi = o.e_hi;
    }
    const int cols = static_cast<int>(out.vectors.cols());
    out.tail.resize(cols);
    out.converged.assign(cols, 0);
    for (int c = 0; c < cols; ++c) {
        double t = 0.0;
        for (int r : edge) t += out.vectors(r, c) * out.vectors(r, c);
        out.tail[c] = t;
        out.converged[c] = t <= o.delta ? 1 : 0;
    }
    out.fock = std::move(blk.fock);
    out.sym = std::move(blk.sym);
    return out;
}

EigenSolution solve_once(const ModelParams& p, const SolveOptions& o, int trunc) {
    EigenSolution sol;
    sol.params = p;
    sol.basis = BasisSpec{o.kind, trunc, p.j};
    sol.delta = o.delta;
    auto blocks = build_blocks(p, o.kind, trunc, sol.frame);
    sol.sectors.reserve(blocks.size());
    for (auto& b : blocks) sol.sectors.push_back(solve_block(std::move(b), o.kind, trunc, o));
    return sol;
}

bool window_stable(const EigenSolution& a, const EigenSolution& b, double lo, double hi) {
    for (const auto& sec : a.sectors) {
        const auto la = converged_levels(a, sec.label, lo, hi);
        const auto lb = converged_levels(b, sec.label, lo, hi);
        if (la.size() != lb.size()) return false;
        for (std::size_t k = 0; k < la.size(); ++k)
            if (std::abs(la[k] - lb[k]) > 1e-8) return false;
    }
    return true;
}

}  // namespace

int suggest_truncation(const ModelParams& p, BasisKind kind, double eps_top) {
    const double ncl = p.j * classical_boson_ceiling(p, kind, eps_top);
    const double margin = std::max(16.0, 4.0 * std::sqrt(ncl + 1.0));
    return static_cast<int>(std::ceil(ncl + margin));
}

EigenSolution solve_spectrum(const ModelParams& p, const SolveOptions& opts) {
    p.validate();
    if (opts.kind == BasisKind::displaced && p.f != 1)
        throw std::invalid_argument("solve_spectrum: displaced basis requires f = 1");
    if (!opts.full_vectors && !(opts.e_lo < opts.e_hi))
        throw std::invalid_argument("solve_spectrum: windowed mode needs e_lo < e_hi");
    if (opts.truncation > 0) return solve_once(p, opts, opts.truncation);
    if (!(opts.e_lo < opts.e_hi))
        throw std::invalid_argument("solve_spectrum: adaptive truncation needs an energy window");

    int trunc = std::max(suggest_truncation(p, opts.kind, opts.e_hi / p.j), p.f + 1);
    EigenSolution cur = solve_once(p, opts, trunc);
    for (int round = 0; round < opts.max_rounds; ++round) {
        const int bigger = static_cast<int>(std::ceil(trunc * opts.growth));
        EigenSolution next = solve_once(p, opts, bigger);
        if (window_stable(cur, next, opts.e_lo, opts.e_hi)) return next;
        trunc = bigger;
        cur = std::move(next);
    }
    throw std::runtime_error("solve_spectrum: truncation still moving after " +
                             std::to_string(opts.max_rounds) + " growth rounds");
}

std::vector<StateRef> converged_states(const EigenSolution& sol, double e_lo, double e_hi) {
    std::vector<std::pair<double, StateRef>> acc;
    for (int s = 0; s < static_cast<int>(sol.sectors.size()); ++s) {
        const auto& sec = sol.sectors[s];
        for (int c = 0; c < static_cast<int>(sec.vectors.cols()); ++c) {
            if (!sec.converged[c]) continue;
            const double e = sec.energies[sec.vec_first + c];
            if (e < e_lo || e > e_hi) continue;
            acc.push_back({e, StateRef{s, sec.vec_first + c}});
        }
    }
    std::sort(acc.begin(), acc.end(), [&](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first < y.first;
        return sol.sectors[x.second.sector].label < sol.sectors[y.second.sector].label;
    });
    std::vector<StateRef> out;
    out.reserve(acc.size());
    for (const auto& [e, ref] : acc) out.push_back(ref);
    return out;
}

std::vector<double> converged_levels(const EigenSolution& sol, int sector, double e_lo,
                                     double e_hi) {
    const SectorSolution* sec = nullptr;
    for (const auto& s : sol.sectors)
        if (s.label == sector) sec = &s;
    if (!sec) throw std::invalid_argument("converged_levels: no sector " + std::to_string(sector));
    if (e_lo < sec->vec_lo || e_hi > sec->vec_hi)
        throw std::invalid_argument("converged_levels: window exceeds the stored vector span");
    std::vector<double> out;
    for (int c = 0; c < static_cast<int>(sec->vectors.cols()); ++c) {
        const double e = sec->energies[sec->vec_first + c];
        if (e >= e_lo && e <= e_hi && sec->converged[c]) out.push_back(e);
    }
    return out;
}

double energy_of(const EigenSolution& sol, StateRef ref) {
    return sol.sectors.at(ref.sector).energies[ref.index];
}

int vector_column(const EigenSolution& sol, StateRef ref) {
    const auto& sec = sol.sectors.at(ref.sector);
    const int c = ref.index - sec.vec_first;
    return c >= 0 && c < sec.vectors.cols() ? c : -1;
}

double jx2_over_j2(const EigenSolution& sol, StateRef ref) {
    const auto& sec = sol.sectors.at(ref.sector);
    const int col = vector_column(sol, ref);
    if (col < 0) throw std::invalid_argument("jx2_over_j2: state has no stored vector");
    const auto v = sec.vectors.col(col);
    const double j = sol.params.j;

    if (sol.basis.kind == BasisKind::displaced) {
        const auto& mx = sol.frame->mx;
        double acc = 0.0;
        for (std::size_t i = 0; i < sec.sym.size(); ++i) {
            const double m = mx(sec.sym[i].mu_hi);  // the mirror column has -m
            acc += v(i) * v(i) * m * m;
        }
        return acc / (j * j);
    }

    // photon basis: diagonal part plus the m -> m + 2 ladder terms
    const int ns = sol.params.n_spin();
    const int nmax = sol.basis.truncation;
    Eigen::MatrixXi pos(nmax + 1, ns);
    pos.setConstant(-1);
    for (int i = 0; i < static_cast<int>(sec.fock.states.size()); ++i)
        pos(sec.fock.states[i].n, sec.fock.states[i].mu) = i;
    double acc = 0.0;
    for (int i = 0; i < static_cast<int>(sec.fock.states.size()); ++i) {
        const auto [n, mu] = sec.fock.states[i];
        const double m = sol.params.m_z(mu);
        acc += v(i) * v(i) * 0.5 * (j * (j + 1.0) - m * m);
        if (mu + 2 < ns) {
            const int k = pos(n, mu + 2);
            if (k >= 0)
                acc += 0.5 * spin_ladder_up(j, m + 1.0) * spin_ladder_up(j, m) * v(i) * v(k);
        }
    }
    return acc / (j * j);
}

Eigen::MatrixXd fock_matrix(const EigenSolution& sol, StateRef ref, int n_fock) {
    const auto& sec = sol.sectors.at(ref.sector);
    const int col = vector_column(sol, ref);
    if (col < 0) throw std::invalid_argument("fock_matrix: state has no stored vector");
    const auto v = sec.vectors.col(col);
    const int ns = sol.params.n_spin();

    if (sol.basis.kind == BasisKind::fock) {
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n_fock + 1, ns);
        for (int i = 0; i < static_cast<int>(sec.fock.states.size()); ++i) {
            const auto [n, mu] = sec.fock.states[i];
            if (n <= n_fock) c(n, mu) = v(i);
        }
        return c;
    }
    const Eigen::MatrixXd V =
        displaced_amplitudes(sec.sym, sol.params.two_j(), sol.basis.truncation, v);
    return displaced_to_fock(*sol.frame, V, n_fock);
}

double fock_conversion_tail(const Eigen::MatrixXd& c) {
    return std::max(0.0, 1.0 - c.squaredNorm());
}

}  // namespace dicke
