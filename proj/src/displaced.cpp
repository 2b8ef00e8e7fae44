#include "dicke/displaced.hpp"

#include <cmath>
#include <stdexcept>

#include "dicke/lapack.hpp"

namespace dicke {

Eigen::MatrixXd displacement_columns(double t, int rows, int cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("displacement_columns: empty block");
    Eigen::MatrixXd d(rows, cols);

    // column 0 is the coherent state |t>; build the log of each entry so large
    // shifts cannot overflow on the way to a representable result
    const double sgn = (t < 0.0) ? -1.0 : 1.0;
    const double lt = (t == 0.0) ? -std::numeric_limits<double>::infinity() : std::log(std::abs(t));
    for (int n = 0; n < rows; ++n) {
        if (t == 0.0) {
            d(n, 0) = (n == 0) ? 1.0 : 0.0;
            continue;
        }
        const double ln = -0.5 * t * t + n * lt - 0.5 * std::lgamma(n + 1.0);
        d(n, 0) = std::pow(sgn, n) * std::exp(ln);
    }

    // D(t)|N+1> = (a^dag - t) D(t)|N> / sqrt(N+1); the update for entry n only
    // reads entries n and n-1, so truncating the top rows never corrupts the
    // block we keep
    for (int N = 0; N + 1 < cols; ++N) {
        const double r = 1.0 / std::sqrt(N + 1.0);
        d(0, N + 1) = -t * d(0, N) * r;
        for (int n = 1; n < rows; ++n)
            d(n, N + 1) = (std::sqrt(static_cast<double>(n)) * d(n - 1, N) - t * d(n, N)) * r;
    }
    return d;
}

std::shared_ptr<const DisplacedFrame> build_displaced_frame(const ModelParams& p, int cap) {
    p.validate();
    if (p.f != 1)
        throw std::invalid_argument("build_displaced_frame: shifted basis exists for f = 1 only");
    if (cap < 1) throw std::invalid_argument("build_displaced_frame: cap too small");

    auto frame = std::make_shared<DisplacedFrame>();
    frame->params = p;
    frame->cap = cap;
    frame->G = 2.0 * p.gamma / (p.omega * std::sqrt(p.n_atoms()));

    const int ns = p.n_spin();
    const int two_j = p.two_j();

    // Jx is tridiagonal in the m_z basis; its eigenvectors define the frame
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(ns);
    Eigen::VectorXd off(ns - 1);
    for (int k = 0; k + 1 < ns; ++k) off(k) = 0.5 * spin_ladder_up(p.j, p.m_z(k));
    auto jx = lapack::eig_tridiag(diag, off);
    frame->mx = jx.values;
    frame->spin_rot = jx.vectors;

    // pin the overall sign of each column so the frame is reproducible
    for (int mu = 0; mu < ns; ++mu) {
        int arg = 0;
        frame->spin_rot.col(mu).cwiseAbs().maxCoeff(&arg);
        if (frame->spin_rot(arg, mu) < 0.0) frame->spin_rot.col(mu) *= -1.0;
    }

    // Jz rotated into the Jx eigenbasis; rotation guarantees tridiagonal form,
    // anything beyond the band is a construction bug
    Eigen::VectorXd mz(ns);
    for (int k = 0; k < ns; ++k) mz(k) = p.m_z(k);
    frame->jz_x = frame->spin_rot.transpose() * mz.asDiagonal() * frame->spin_rot;
    double spill = 0.0;
    for (int a = 0; a < ns; ++a)
        for (int b = 0; b < ns; ++b)
            if (std::abs(a - b) > 1) spill = std::max(spill, std::abs(frame->jz_x(a, b)));
    if (spill > 1e-10 * (p.j + 1.0))
        throw std::runtime_error("build_displaced_frame: Jz lost tridiagonality in the Jx frame");

    // parity phase on each column pair: exp(i pi (Jz + j)) maps m_x -> -m_x
    frame->zeta.resize(ns);
    for (int mu = 0; mu < ns; ++mu) {
        double z = 0.0;
        for (int k = 0; k < ns; ++k)
            z += frame->spin_rot(k, two_j - mu) * ((k % 2) ? -1.0 : 1.0) * frame->spin_rot(k, mu);
        if (std::abs(std::abs(z) - 1.0) > 1e-10)
            throw std::runtime_error("build_displaced_frame: parity phase not unimodular");
        frame->zeta(mu) = (z < 0.0) ? -1.0 : 1.0;
    }

    frame->hop = displacement_columns(frame->G, cap + 1, cap + 1);
    return frame;
}

namespace {

struct SectorLayout {
    std::vector<DisplacedSymState> states;
    Eigen::MatrixXi pos;   // (M, column) -> flat index or -1
    Eigen::MatrixXi sgn;   // (M, column) -> +-1 pair sign, 0 for the middle column
    int mu_lowest{0};      // smallest column index that appears (mid or first pair)
};

SectorLayout layout_sector(const DisplacedFrame& fr, int label) {
    const int two_j = fr.params.two_j();
    const int ns = two_j + 1;
    const int parity = 1 - 2 * label;
    const bool has_mid = (two_j % 2 == 0);
    const int mu_first_pair = two_j / 2 + 1;

    SectorLayout lay;
    lay.pos = Eigen::MatrixXi::Constant(fr.cap + 1, ns, -1);
    lay.sgn = Eigen::MatrixXi::Zero(fr.cap + 1, ns);
    lay.mu_lowest = has_mid ? two_j / 2 : mu_first_pair;

    for (int M = 0; M <= fr.cap; ++M) {
        const int boson_parity = (M % 2) ? -1 : 1;
        if (has_mid) {
            const int mid = two_j / 2;
            if (boson_parity * static_cast<int>(fr.zeta(mid)) == parity) {
                lay.pos(M, mid) = static_cast<int>(lay.states.size());
                lay.states.push_back({M, mid, 0});
            }
        }
        for (int mu = mu_first_pair; mu <= two_j; ++mu) {
            const int s = parity * boson_parity * static_cast<int>(fr.zeta(mu));
            lay.pos(M, mu) = static_cast<int>(lay.states.size());
            lay.sgn(M, mu) = s;
            lay.states.push_back({M, mu, s});
        }
    }
    return lay;
}

}  // namespace

std::vector<DisplacedSector> build_displaced_blocks(const ModelParams& p, int cap) {
    auto frame = build_displaced_frame(p, cap);
    const auto& fr = *frame;
    const int two_j = p.two_j();
    const int nq = cap + 1;
    const double w0 = p.omega0;
    const bool has_mid = (two_j % 2 == 0);
    const int mid = two_j / 2;
    const int mu_first_pair = two_j / 2 + 1;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    std::vector<DisplacedSector> out(2);
    std::size_t total = 0;
    for (int label = 0; label < 2; ++label) {
        auto lay = layout_sector(fr, label);
        DisplacedSector& sec = out[label];
        sec.label = label;
        sec.frame = frame;
        sec.states = std::move(lay.states);
        total += sec.states.size();
        const long dim = static_cast<long>(sec.states.size());
        sec.h = Eigen::MatrixXd::Zero(dim, dim);

        // on-column energy: the shifted oscillator plus the Jx^2 pull-down
        for (const auto& st : sec.states) {
            const int i = lay.pos(st.M, st.mu_hi);
            const double mxv = fr.mx(st.mu_hi);
            sec.h(i, i) += p.omega * st.M - p.omega * fr.G * fr.G * mxv * mxv +
                           w0 * fr.jz_x(st.mu_hi, st.mu_hi);
        }

        // half-integer j: the innermost pair couples to its own mirror
        if (!has_mid) {
            const int mu = mu_first_pair;  // partner is mu - 1 = 2j - mu
            const double c = 0.5 * w0 * fr.jz_x(mu, mu - 1);
            for (int Mr = 0; Mr <= cap; ++Mr)
                for (int Mc = 0; Mc <= cap; ++Mc) {
                    const int i = lay.pos(Mr, mu), k = lay.pos(Mc, mu);
                    sec.h(i, k) += c * (lay.sgn(Mc, mu) * fr.hop(Mr, Mc) +
                                        lay.sgn(Mr, mu) * fr.hop(Mc, Mr));
                }
        }

        // integer j: middle column to first pair
        if (has_mid) {
            const double c_hi = w0 * fr.jz_x(mid + 1, mid);
            const double c_lo = w0 * fr.jz_x(mid - 1, mid);
            for (int Mr = 0; Mr <= cap; ++Mr)
                for (int Mc = 0; Mc <= cap; ++Mc) {
                    const int i = lay.pos(Mr, mid + 1), k = lay.pos(Mc, mid);
                    if (k < 0) continue;
                    const double v = inv_sqrt2 * (c_hi * fr.hop(Mr, Mc) +
                                                  lay.sgn(Mr, mid + 1) * c_lo * fr.hop(Mc, Mr));
                    sec.h(i, k) += v;
                    sec.h(k, i) += v;
                }
        }

        // neighbouring pairs; the mirrored columns ride along with the pair sign
        for (int mu = mu_first_pair; mu < two_j; ++mu) {
            const double c_hi = w0 * fr.jz_x(mu + 1, mu);
            const double c_lo = w0 * fr.jz_x(two_j - mu - 1, two_j - mu);
            for (int Mr = 0; Mr <= cap; ++Mr)
                for (int Mc = 0; Mc <= cap; ++Mc) {
                    const int i = lay.pos(Mr, mu + 1), k = lay.pos(Mc, mu);
                    const double v =
                        0.5 * (c_hi * fr.hop(Mr, Mc) +
                               lay.sgn(Mr, mu + 1) * lay.sgn(Mc, mu) * c_lo * fr.hop(Mc, Mr));
                    sec.h(i, k) += v;
                    sec.h(k, i) += v;
                }
        }
    }

    if (total != static_cast<std::size_t>(nq) * (two_j + 1))
        throw std::runtime_error("build_displaced_blocks: sector dimensions do not add up");
    return out;
}

Eigen::MatrixXd displaced_amplitudes(const std::vector<DisplacedSymState>& states, int two_j,
                                     int cap, const Eigen::Ref<const Eigen::VectorXd>& v) {
    if (v.size() != static_cast<long>(states.size()))
        throw std::invalid_argument("displaced_amplitudes: vector length mismatch");
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(cap + 1, two_j + 1);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& st = states[i];
        if (st.sign == 0) {
            V(st.M, st.mu_hi) = v(i);
        } else {
            V(st.M, st.mu_hi) += v(i) * inv_sqrt2;
            V(st.M, two_j - st.mu_hi) += st.sign * v(i) * inv_sqrt2;
        }
    }
    return V;
}

Eigen::MatrixXd displaced_amplitudes(const DisplacedSector& sec,
                                     const Eigen::Ref<const Eigen::VectorXd>& v) {
    return displaced_amplitudes(sec.states, sec.frame->params.two_j(), sec.frame->cap, v);
}

Eigen::MatrixXd displaced_to_fock(const DisplacedFrame& frame, const Eigen::MatrixXd& V,
                                  int n_fock) {
    const int ns = frame.params.n_spin();
    if (V.rows() != frame.cap + 1 || V.cols() != ns)
        throw std::invalid_argument("displaced_to_fock: amplitude shape mismatch");
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n_fock + 1, ns);
    for (int mu = 0; mu < ns; ++mu) {
        const double alpha = -frame.G * frame.mx(mu);
        const Eigen::MatrixXd cols = displacement_columns(alpha, n_fock + 1, frame.cap + 1);
        const Eigen::VectorXd w = cols * V.col(mu);
        C.noalias() += w * frame.spin_rot.col(mu).transpose();
    }
    return C;
}

}  // namespace dicke
