// lapack.hpp - thin wrappers over the LAPACKE dense symmetric solvers
#pragma once

#include <Eigen/Dense>

namespace dicke::lapack {

struct EigAll {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // one eigenvector per column
};

// divide-and-conquer solve of a symmetric matrix, all pairs
EigAll eig_all(Eigen::MatrixXd a);

// eigenvalues only
Eigen::VectorXd eig_values(Eigen::MatrixXd a);

// All eigenvalues plus eigenvectors restricted to values in (lo, hi].
// Tridiagonalizes once, then runs the MRRR selector on the band, so the
// vector count and not the matrix size pays for the back-transform.
struct EigWindow {
    Eigen::VectorXd values;   // every eigenvalue, ascending
    Eigen::MatrixXd vectors;  // columns for values[first .. first + cols)
    int first{0};
};
EigWindow eig_window(Eigen::MatrixXd a, double lo, double hi);

struct TridiagEig {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};
TridiagEig eig_tridiag(Eigen::VectorXd diag, Eigen::VectorXd off);
Eigen::VectorXd eig_tridiag_values(Eigen::VectorXd diag, Eigen::VectorXd off);

}  // namespace dicke::lapack
