// husimi.cpp - coherent tables, field evaluation, shell integrals
#include "dicke/husimi.hpp"

#include <random>
#include <stdexcept>

#include "dicke/classical.hpp"

namespace dicke {

CoherentTables coherent_tables(double j, int n_fock, const std::vector<PhasePoint>& pts) {
    const int np = static_cast<int>(pts.size());
    const int two_j = static_cast<int>(std::lround(2.0 * j));
    const int ns = two_j + 1, rows = n_fock + 1;
    CoherentTables t;
    t.f_re.setZero(rows, np);
    t.f_im.setZero(rows, np);
    t.g_re.setZero(ns, np);
    t.g_im.setZero(ns, np);

    std::vector<double> ln_choose(ns);
    for (int k = 0; k < ns; ++k)
        ln_choose[k] = std::lgamma(two_j + 1.0) - std::lgamma(k + 1.0) -
                       std::lgamma(two_j - k + 1.0);
    std::vector<double> ln_fact(rows);
    for (int n = 0; n < rows; ++n) ln_fact[n] = std::lgamma(n + 1.0);

    for (int c = 0; c < np; ++c) {
        const auto& pt = pts[c];
        const double ar = std::sqrt(0.5 * j) * pt.q, ai = std::sqrt(0.5 * j) * pt.p;
        const double a2 = ar * ar + ai * ai;
        if (a2 == 0.0) {
            t.f_re(0, c) = 1.0;
        } else {
            const double la = 0.5 * std::log(a2), phi = std::atan2(ai, ar);
            for (int n = 0; n < rows; ++n) {
                const double mag = std::exp(-0.5 * a2 + n * la - 0.5 * ln_fact[n]);
                t.f_re(n, c) = mag * std::cos(n * phi);
                t.f_im(n, c) = mag * std::sin(n * phi);
            }
        }
        const double th = classical::theta(pt.Q, pt.P);
        if (th < 1e-9)
            throw std::invalid_argument("coherent_tables: point sits on the disk edge");
        const double br = 0.5 * pt.Q / th, bi = 0.5 * pt.P / th;
        const double b2 = br * br + bi * bi;
        if (b2 == 0.0) {
            t.g_re(0, c) = 1.0;
        } else {
            const double lb = 0.5 * std::log(b2), psi = std::atan2(bi, br);
            const double base = two_j * std::log(th);
            for (int k = 0; k < ns; ++k) {
                const double mag = std::exp(base + 0.5 * ln_choose[k] + k * lb);
                t.g_re(k, c) = mag * std::cos(k * psi);
                t.g_im(k, c) = mag * std::sin(k * psi);
            }
        }
    }
    return t;
}

Eigen::VectorXd husimi_values(const Eigen::MatrixXd& c, const CoherentTables& t) {
    if (c.rows() != t.f_re.rows() || c.cols() != t.g_re.rows())
        throw std::invalid_argument("husimi_values: photon matrix does not match the tables");
    // overlap with the coherent product state conjugates both table factors
    const Eigen::MatrixXd ur = c * t.g_re;
    const Eigen::MatrixXd ui = c * t.g_im;
    const Eigen::VectorXd zr =
        (t.f_re.cwiseProduct(ur) - t.f_im.cwiseProduct(ui)).colwise().sum().transpose();
    const Eigen::VectorXd zi =
        (t.f_re.cwiseProduct(ui) + t.f_im.cwiseProduct(ur)).colwise().sum().transpose();
    return zr.array().square() + zi.array().square();
}

SectionGrid section_grid(const classical::ClassicalityGrid& g) {
    SectionGrid s;
    s.eps = g.eps;
    for (int i = 0; i < g.n; ++i)
        for (int k = 0; k < g.n; ++k) {
            if (g.at(i, k) == classical::CellStatus::outside) continue;
            const double Q = g.coord(i), P = g.coord(k);
            const double q0 = classical::q_plus(g.params, g.eps, Q, P);
            s.pts.push_back({q0, 0.0, Q, P, 1.0});
            s.chaotic.push_back(g.at(i, k) == classical::CellStatus::chaotic ? 1 : 0);
        }
    return s;
}

double delocalization_measure(const Eigen::VectorXd& values,
                              const std::vector<std::uint8_t>& chaotic, double nu) {
    if (values.size() != static_cast<long>(chaotic.size()))
        throw std::invalid_argument("delocalization_measure: mask length mismatch");
    if (!(nu > 0.0)) throw std::invalid_argument("delocalization_measure: nu must be positive");
    const int whole = static_cast<int>(nu);
    const bool integral = std::abs(nu - whole) < 1e-12;
    double top = 0.0, tot = 0.0;
    for (long i = 0; i < values.size(); ++i) {
        const double v = values[i];
        double w;
        if (integral) {
            w = 1.0;
            for (int k = 0; k < whole; ++k) w *= v;
        } else {
            w = std::pow(v, nu);
        }
        tot += w;
        if (chaotic[i]) top += w;
    }
    if (tot <= 0.0) throw std::runtime_error("delocalization_measure: field vanished");
    return 2.0 * top / tot - 1.0;
}

std::vector<PhasePoint> sample_shell(const ModelParams& p, double eps, int n, double span,
                                     int per_cell, std::uint64_t seed) {
    p.validate();
    if (n < 2 || per_cell < 1) throw std::invalid_argument("sample_shell: bad grid request");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-0.5 * std::numbers::pi,
                                                 0.5 * std::numbers::pi);
    const double step = 2.0 * span / (n - 1.0);
    const double cell_area = step * step;
    std::vector<PhasePoint> out;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double Q = -span + step * i, P = -span + step * k;
            const double th = classical::theta(Q, P);
            if (th < 1e-6) continue;
            const double w = classical::shell_weight(p, eps, Q, P);
            if (w <= 0.0) continue;
            const double kk = eps + p.omega0 - 0.5 * p.omega0 * (Q * Q + P * P);
            const double wq = Q * th;
            const double wgt = cell_area * w / (2.0 * per_cell);
            for (int s = 0; s < per_cell; ++s) {
                const double t = angle(rng);
                double q1, q2, pp;
                if (p.f == 1) {
                    const double c = 2.0 * p.gamma * wq / p.omega;
                    const double pmax =
                        std::sqrt(4.0 * p.gamma * p.gamma * wq * wq + 2.0 * p.omega * kk) /
                        p.omega;
                    q1 = -c + pmax * std::cos(t);
                    q2 = -c - pmax * std::cos(t);
                    pp = pmax * std::sin(t);
                } else {
                    const double a = 0.5 * p.omega + p.gamma * wq;
                    const double b = 0.5 * p.omega - p.gamma * wq;
                    const double qa = std::sqrt(kk / a);
                    q1 = qa * std::cos(t);
                    q2 = -q1;
                    pp = std::sqrt(kk / b) * std::sin(t);
                }
                out.push_back({q1, pp, Q, P, wgt});
                out.push_back({q2, pp, Q, P, wgt});
            }
        }
    return out;
}

ShellOccupation shell_occupation(const Eigen::VectorXd& values,
                                 const std::vector<PhasePoint>& pts) {
    if (values.size() != static_cast<long>(pts.size()))
        throw std::invalid_argument("shell_occupation: value count mismatch");
    double vol = 0.0, c1 = 0.0, c2 = 0.0, clog = 0.0;
    for (long i = 0; i < values.size(); ++i) {
        const double w = pts[i].wgt, x = values[i];
        vol += w;
        c1 += w * x;
        c2 += w * x * x;
        if (x > 0.0) clog += w * x * std::log(x);
    }
    if (vol <= 0.0 || c1 <= 0.0)
        throw std::runtime_error("shell_occupation: degenerate field or empty shell");
    ShellOccupation o;
    o.l2 = c1 * c1 / (vol * c2);
    o.l1 = c1 / vol * std::exp(-clog / c1);
    return o;
}

RandomOccupation delocalization_thresholds(const std::vector<Eigen::MatrixXd>& states, double j,
                                           int n_fock, const std::vector<PhasePoint>& pts,
                                           int ensemble_size, std::uint64_t seed) {
    if (states.size() < 10)
        throw std::invalid_argument("delocalization thresholds: window too thin");
    if (ensemble_size < 20)
        throw std::invalid_argument("delocalization thresholds: need at least 20 draws");
    if (pts.empty()) throw std::invalid_argument("delocalization thresholds: no sample points");

    // every draw superposes the whole window with real unit normals; the
    // normalization drops out of both occupation ratios
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Eigen::MatrixXd> draws(ensemble_size);
    for (auto& d : draws) {
        d.setZero(states.front().rows(), states.front().cols());
        for (const auto& st : states) d += gauss(rng) * st;
    }

    // stream the points in chunks so the coherent tables are built once per
    // chunk and shared by all draws
    const std::size_t chunk = 8192;
    std::vector<double> vol(ensemble_size, 0.0), c1(ensemble_size, 0.0), c2(ensemble_size, 0.0),
        clog(ensemble_size, 0.0);
    for (std::size_t base = 0; base < pts.size(); base += chunk) {
        const std::size_t nb = std::min(chunk, pts.size() - base);
        const std::vector<PhasePoint> sub(pts.begin() + base, pts.begin() + base + nb);
        const CoherentTables tables = coherent_tables(j, n_fock, sub);
        for (int d = 0; d < ensemble_size; ++d) {
            const Eigen::VectorXd vals = husimi_values(draws[d], tables);
            for (std::size_t i = 0; i < nb; ++i) {
                const double w = sub[i].wgt, x = vals[static_cast<long>(i)];
                vol[d] += w;
                c1[d] += w * x;
                c2[d] += w * x * x;
                if (x > 0.0) clog[d] += w * x * std::log(x);
            }
        }
    }

    double s1 = 0.0, s1sq = 0.0, s2 = 0.0, s2sq = 0.0;
    for (int d = 0; d < ensemble_size; ++d) {
        if (vol[d] <= 0.0 || c1[d] <= 0.0)
            throw std::runtime_error("delocalization thresholds: degenerate draw");
        const double l2 = c1[d] * c1[d] / (vol[d] * c2[d]);
        const double l1 = c1[d] / vol[d] * std::exp(-clog[d] / c1[d]);
        s1 += l1;
        s1sq += l1 * l1;
        s2 += l2;
        s2sq += l2 * l2;
    }
    RandomOccupation out;
    out.draws = ensemble_size;
    out.l1 = s1 / ensemble_size;
    out.l2 = s2 / ensemble_size;
    const double v1 = std::max(0.0, s1sq / ensemble_size - out.l1 * out.l1);
    const double v2 = std::max(0.0, s2sq / ensemble_size - out.l2 * out.l2);
    out.l1_se = std::sqrt(v1 / std::max(1, ensemble_size - 1));
    out.l2_se = std::sqrt(v2 / std::max(1, ensemble_size - 1));
    return out;
}

}  // namespace dicke
