// husimi.hpp - coherent-state fields of eigenstates and localization measures
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "dicke/chaos_map.hpp"
#include "dicke/model.hpp"

namespace dicke {

struct PhasePoint {
    double q{0.0}, p{0.0}, Q{0.0}, P{0.0};
    double wgt{1.0};  // quadrature weight for shell integrals
};

// Coherent overlap factors for a batch of phase-space points, evaluated
// entrywise in the log domain (every factor is bounded by one, so the exp
// never overflows). The oscillator label is alpha = sqrt(j/2)(q + ip), the
// spin label beta = (Q + iP)/(2 Theta).
struct CoherentTables {
    Eigen::MatrixXd f_re, f_im;  // oscillator factors, (n_fock + 1) x n_pts
    Eigen::MatrixXd g_re, g_im;  // spin factors, (2j + 1) x n_pts
};

CoherentTables coherent_tables(double j, int n_fock, const std::vector<PhasePoint>& pts);

// |<x|E>|^2 at every tabulated point, from the state's photon matrix C(n, k)
Eigen::VectorXd husimi_values(const Eigen::MatrixXd& c, const CoherentTables& t);

// shell section at p = 0 with q on the outer turning branch, restricted to
// the accessible cells of a classification grid
struct SectionGrid {
    double eps{0.0};
    std::vector<PhasePoint> pts;
    std::vector<std::uint8_t> chaotic;  // classical classification per cell
};

SectionGrid section_grid(const classical::ClassicalityGrid& g);

// 2 (chaotic share of the nu-th moment of the field) - 1, in [-1, 1]
double delocalization_measure(const Eigen::VectorXd& values,
                              const std::vector<std::uint8_t>& chaotic, double nu);

// stratified microcanonical sample over the whole shell: every cell draw
// yields the two oscillator roots, each carrying half the draw's weight
std::vector<PhasePoint> sample_shell(const ModelParams& p, double eps, int n, double span,
                                     int per_cell, std::uint64_t seed);

// occupation ratios of a field over weighted points; both equal one for a
// field that is uniform wherever the weight lives
struct ShellOccupation {
    double l1{0.0};
    double l2{0.0};
};

ShellOccupation shell_occupation(const Eigen::VectorXd& values,
                                 const std::vector<PhasePoint>& pts);

// limits reached by fully delocalized states (random-superposition statistics)
inline const double delocalized_l2 = 0.5;
inline const double delocalized_l1 = std::exp(std::numbers::egamma - 1.0);

// occupation ceiling measured on random Gaussian superpositions of a state
// set: ensemble means of L1, L2 with their standard errors
struct RandomOccupation {
    double l1{0.0};
    double l2{0.0};
    double l1_se{0.0};
    double l2_se{0.0};
    int draws{0};
};

// states are photon matrices in a common (n_fock + 1) x (2j + 1) frame; draws
// superpose them with real unit normals and measure occupation over pts
RandomOccupation delocalization_thresholds(const std::vector<Eigen::MatrixXd>& states, double j,
                                           int n_fock, const std::vector<PhasePoint>& pts,
                                           int ensemble_size, std::uint64_t seed);

}  // namespace dicke
