// displaced.hpp - coherent-shifted oscillator basis for the one-photon model
//
// Completing the square in the f = 1 Hamiltonian with A = a + G Jx and
// G = 2 gamma / (omega sqrt(N)) gives
//
//     H = omega A^dag A - omega G^2 Jx^2 + omega0 Jz.
//
// Basis states |M; mu> carry M quanta of A^dag on top of the coherent vacuum
// attached to the Jx eigenstate with eigenvalue m_x(mu); the bosonic part is
// the Fock state |M> displaced by alpha = -G m_x. In this basis A^dag A and
// Jx^2 are diagonal while Jz hops mu by one and drags a fixed displacement
// D(+-G) along on the oscillator. Low-lying eigenstates need far fewer quanta
// here than raw photon numbers, which is what makes strong coupling at large
// j affordable.
#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "dicke/model.hpp"

namespace dicke {

// Frame data shared by every block of one (params, cap) run.
struct DisplacedFrame {
    ModelParams params;
    int cap{0};              // highest shifted quantum number kept
    double G{0.0};           // oscillator shift per unit m_x
    Eigen::VectorXd mx;      // Jx eigenvalues, ascending; index mu = 0..2j
    Eigen::MatrixXd spin_rot;  // O(k, mu) = <j, m_z = k - j | j, m_x(mu)>, orthogonal
    Eigen::MatrixXd jz_x;      // Jz in the Jx eigenbasis; tridiagonal
    Eigen::VectorXd zeta;      // parity phase: Pi |M, mu> = (-1)^M zeta(mu) |M, 2j - mu>
    Eigen::MatrixXd hop;       // <M'| D(+G) |M> on the shifted quanta
};

std::shared_ptr<const DisplacedFrame> build_displaced_frame(const ModelParams& p, int cap);

// <n| D(t) |N> for real t, n < rows, N < cols. Columns are displaced Fock
// states in the number basis.
Eigen::MatrixXd displacement_columns(double t, int rows, int cols);

// Parity eigenbasis over the column pairs (mu, 2j - mu). sign is the relative
// phase of the two members; 0 marks the unpaired middle column of integer j.
struct DisplacedSymState {
    int M;
    int mu_hi;  // the larger column index of the pair
    int sign;
};

struct DisplacedSector {
    int label{0};  // parity index, eigenvalue (-1)^label
    std::vector<DisplacedSymState> states;
    Eigen::MatrixXd h;
    std::shared_ptr<const DisplacedFrame> frame;
};

// Both parity blocks of the one-photon Hamiltonian. Throws for f != 1.
std::vector<DisplacedSector> build_displaced_blocks(const ModelParams& p, int cap);

// Amplitudes V(M, mu) of a sector eigenvector in the plain |M; mu> basis.
Eigen::MatrixXd displaced_amplitudes(const std::vector<DisplacedSymState>& states, int two_j,
                                     int cap, const Eigen::Ref<const Eigen::VectorXd>& v);
Eigen::MatrixXd displaced_amplitudes(const DisplacedSector& sec,
                                     const Eigen::Ref<const Eigen::VectorXd>& v);

// Photon-number coefficients C(n, k), k = m_z + j, truncated at n_fock rows.
Eigen::MatrixXd displaced_to_fock(const DisplacedFrame& frame, const Eigen::MatrixXd& V,
                                  int n_fock);

}  // namespace dicke
