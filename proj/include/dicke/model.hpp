// model.hpp - spin-boson model parameters and parity-sector bookkeeping
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace dicke {

// A single bosonic mode coupled to a collective pseudospin of length j.
// The interaction exchanges f field quanta per spin flip; f = 2 has a finite
// coupling range (spectral collapse at gamma = omega/2).
struct ModelParams {
    double omega{1.0};   // field frequency
    double omega0{1.0};  // atomic splitting
    double gamma{0.5};   // coupling strength
    double j{25.0};      // pseudospin length, N/2 two-level atoms
    int f{1};            // photon order of the interaction

    int two_j() const { return static_cast<int>(std::lround(2.0 * j)); }
    int n_spin() const { return two_j() + 1; }
    double n_atoms() const { return 2.0 * j; }
    int n_sectors() const { return 2 * f; }
    double m_z(int mu) const { return static_cast<double>(mu) - j; }

    // gamma / N^(f/2), the prefactor of the coupling term
    double coupling_scale() const { return gamma / std::pow(n_atoms(), 0.5 * f); }

    void validate() const;  // throws std::invalid_argument
};

// spin ladder factor: J+ |j,m> = c_plus(j,m) |j,m+1>
inline double spin_ladder_up(double j, double m) {
    return std::sqrt(j * (j + 1.0) - m * (m + 1.0));
}

// bosonic ladder factor sqrt((n+1)...(n+f)) of the a^f / a^dag^f string
double boson_ladder(int n, int f);

// parity index of Fock state (n, mu), mu = m_z + j. The conserved charge is
// n/f + m_z + j; states with equal (n + f mu) mod 2f share a sector and the
// coupling never leaves it.
inline int parity_label(int n, int mu, int f) { return (n + f * mu) % (2 * f); }

enum class BasisKind : std::uint8_t {
    fock = 0,       // photon number times J_z eigenbasis
    displaced = 1,  // coherent-shifted quanta times J_x eigenbasis (f = 1 only)
};

struct BasisSpec {
    BasisKind kind{BasisKind::fock};
    int truncation{0};  // highest retained boson index, inclusive
    double j{0.0};

    std::int64_t dimension() const {
        return static_cast<std::int64_t>(truncation + 1) *
               (static_cast<std::int64_t>(std::lround(2.0 * j)) + 1);
    }
};

struct FockState {
    int n;   // photon number
    int mu;  // m_z + j
};

struct SectorBasis {
    int label{0};
    std::vector<FockState> states;  // ordered by (n, mu)
};

std::vector<SectorBasis> fock_sectors(const ModelParams& p, int n_max);

}  // namespace dicke
