// hamiltonian.hpp - dense Hamiltonian blocks in the photon-number basis
#pragma once

#include <Eigen/Dense>

#include "dicke/model.hpp"

namespace dicke {

// One parity block, ready for a dense symmetric eigensolver.
struct SectorMatrix {
    SectorBasis basis;
    Eigen::MatrixXd h;
};

// Full matrix over all sectors, index = n * (2j+1) + mu. Only sensible at
// small truncation; production code diagonalizes per-sector blocks.
Eigen::MatrixXd build_fock_full(const ModelParams& p, int n_max,
                                std::vector<int>* labels = nullptr);

SectorMatrix build_fock_sector(const ModelParams& p, int n_max, int label);
std::vector<SectorMatrix> build_fock_blocks(const ModelParams& p, int n_max);

}  // namespace dicke
