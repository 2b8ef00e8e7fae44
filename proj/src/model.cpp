// model.cpp - parameter checks and sector enumeration
#include "dicke/model.hpp"

#include <stdexcept>
#include <string>

namespace dicke {

void ModelParams::validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("ModelParams: omega must be positive");
    if (!(omega0 > 0.0)) throw std::invalid_argument("ModelParams: omega0 must be positive");
    if (!(gamma >= 0.0)) throw std::invalid_argument("ModelParams: gamma must be non-negative");
    if (!(j > 0.0)) throw std::invalid_argument("ModelParams: j must be positive");
    if (std::abs(2.0 * j - std::lround(2.0 * j)) > 1e-9)
        throw std::invalid_argument("ModelParams: 2j must be an integer");
    if (f != 1 && f != 2) throw std::invalid_argument("ModelParams: f must be 1 or 2");
    if (f == 2 && !(gamma < 0.5 * omega))
        throw std::invalid_argument(
            "ModelParams: two-photon coupling requires gamma < omega/2, got gamma = " +
            std::to_string(gamma));
}

double boson_ladder(int n, int f) {
    double a = 1.0;
    for (int k = 1; k <= f; ++k) a *= static_cast<double>(n + k);
    return std::sqrt(a);
}

std::vector<SectorBasis> fock_sectors(const ModelParams& p, int n_max) {
    p.validate();
    if (n_max < p.f) throw std::invalid_argument("fock_sectors: n_max too small");
    std::vector<SectorBasis> out(p.n_sectors());
    for (int s = 0; s < p.n_sectors(); ++s) out[s].label = s;
    for (int n = 0; n <= n_max; ++n)
        for (int mu = 0; mu <= p.two_j(); ++mu)
            out[parity_label(n, mu, p.f)].states.push_back({n, mu});
    return out;
}

}  // namespace dicke
