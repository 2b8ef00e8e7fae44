// eigensolve.hpp - sector diagonalization, convergence tagging, merged views
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "dicke/displaced.hpp"
#include "dicke/hamiltonian.hpp"
#include "dicke/model.hpp"

namespace dicke {

struct SectorSolution {
    int label{0};
    Eigen::VectorXd energies;  // all eigenvalues of the block, ascending
    Eigen::MatrixXd vectors;   // columns for states [vec_first, vec_first + cols)
    int vec_first{0};
    double vec_lo{-std::numeric_limits<double>::infinity()};  // energy span the
    double vec_hi{std::numeric_limits<double>::infinity()};   // vectors cover
    Eigen::VectorXd tail;                 // truncation-row weight per stored vector
    std::vector<std::uint8_t> converged;  // tail <= delta

    // basis payload; exactly one is populated
    SectorBasis fock;
    std::vector<DisplacedSymState> sym;
};

struct EigenSolution {
    ModelParams params;
    BasisSpec basis;
    double delta{1e-6};
    std::vector<SectorSolution> sectors;
    std::shared_ptr<const DisplacedFrame> frame;  // displaced runs only
};

struct SolveOptions {
    BasisKind kind{BasisKind::fock};
    int truncation{0};   // 0 = adaptive: start from the classical support,
    double growth{1.25};  //     grow until the converged window is stable
    int max_rounds{8};
    double delta{1e-6};
    double e_lo{0.0};  // energy window that receives eigenvectors (absolute units)
    double e_hi{0.0};
    bool full_vectors{true};  // small runs: keep every eigenvector
};

// classically occupied boson count at scaled energy eps_top, plus tail margin
int suggest_truncation(const ModelParams& p, BasisKind kind, double eps_top);

EigenSolution solve_spectrum(const ModelParams& p, const SolveOptions& opts);

struct StateRef {
    int sector{0};
    int index{0};  // position in the sector's ascending energy list
};

// converged states with stored vectors, energies in [e_lo, e_hi], ascending;
// ties broken by sector label
std::vector<StateRef> converged_states(const EigenSolution& sol, double e_lo, double e_hi);

// converged levels of one sector inside [e_lo, e_hi]; throws if the stored
// vectors do not cover the request
std::vector<double> converged_levels(const EigenSolution& sol, int sector, double e_lo,
                                     double e_hi);

double energy_of(const EigenSolution& sol, StateRef ref);
int vector_column(const EigenSolution& sol, StateRef ref);  // -1 without a vector

// <Jx^2>/j^2 of a stored eigenstate
double jx2_over_j2(const EigenSolution& sol, StateRef ref);

// photon-number coefficient matrix C(n, k), k = m_z + j
Eigen::MatrixXd fock_matrix(const EigenSolution& sol, StateRef ref, int n_fock);

// fraction of a converted state's weight outside the first n_fock+1 rows
double fock_conversion_tail(const Eigen::MatrixXd& c);

}  // namespace dicke
