#include "dicke/hamiltonian.hpp"

#include <stdexcept>

namespace dicke {

namespace {

// diagonal part omega n + omega0 m_z
double diag_energy(const ModelParams& p, int n, int mu) {
    return p.omega * n + p.omega0 * p.m_z(mu);
}

// coupling element between (n, mu) and (n + f, mu +- 1)
double hop_element(const ModelParams& p, int n, int mu, int dmu) {
    const double m = p.m_z(mu);
    const double spin = (dmu > 0) ? spin_ladder_up(p.j, m) : spin_ladder_up(p.j, m - 1.0);
    return p.coupling_scale() * boson_ladder(n, p.f) * spin;
}

}  // namespace

Eigen::MatrixXd build_fock_full(const ModelParams& p, int n_max, std::vector<int>* labels) {
    p.validate();
    const int ns = p.n_spin();
    const long dim = static_cast<long>(n_max + 1) * ns;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    if (labels) labels->assign(dim, 0);

    auto idx = [ns](int n, int mu) { return static_cast<long>(n) * ns + mu; };
    for (int n = 0; n <= n_max; ++n) {
        for (int mu = 0; mu < ns; ++mu) {
            const long a = idx(n, mu);
            h(a, a) = diag_energy(p, n, mu);
            if (labels) (*labels)[a] = parity_label(n, mu, p.f);
            if (n + p.f <= n_max) {
                for (int dmu : {+1, -1}) {
                    const int mu2 = mu + dmu;
                    if (mu2 < 0 || mu2 >= ns) continue;
                    const long b = idx(n + p.f, mu2);
                    const double v = hop_element(p, n, mu, dmu);
                    h(b, a) = v;
                    h(a, b) = v;
                }
            }
        }
    }
    return h;
}

SectorMatrix build_fock_sector(const ModelParams& p, int n_max, int label) {
    p.validate();
    if (label < 0 || label >= p.n_sectors())
        throw std::invalid_argument("build_fock_sector: label out of range");

    SectorMatrix out;
    out.basis.label = label;
    const int ns = p.n_spin();
    Eigen::MatrixXi pos = Eigen::MatrixXi::Constant(n_max + 1, ns, -1);
    for (int n = 0; n <= n_max; ++n)
        for (int mu = 0; mu < ns; ++mu)
            if (parity_label(n, mu, p.f) == label) {
                pos(n, mu) = static_cast<int>(out.basis.states.size());
                out.basis.states.push_back({n, mu});
            }

    const long dim = static_cast<long>(out.basis.states.size());
    out.h = Eigen::MatrixXd::Zero(dim, dim);
    for (long a = 0; a < dim; ++a) {
        const auto [n, mu] = out.basis.states[a];
        out.h(a, a) = diag_energy(p, n, mu);
        if (n + p.f > n_max) continue;
        for (int dmu : {+1, -1}) {
            const int mu2 = mu + dmu;
            if (mu2 < 0 || mu2 >= ns) continue;
            const int b = pos(n + p.f, mu2);
            if (b < 0) continue;  // cannot happen: the coupling preserves the label
            const double v = hop_element(p, n, mu, dmu);
            out.h(b, a) = v;
            out.h(a, b) = v;
        }
    }
    return out;
}

std::vector<SectorMatrix> build_fock_blocks(const ModelParams& p, int n_max) {
    std::vector<SectorMatrix> out;
    out.reserve(p.n_sectors());
    for (int s = 0; s < p.n_sectors(); ++s) out.push_back(build_fock_sector(p, n_max, s));
    return out;
}

}  // namespace dicke
