// chaos_map.hpp - Lyapunov classification of the atomic plane at fixed energy
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dicke/trajectory.hpp"

namespace dicke::classical {

enum class CellStatus : std::uint8_t { outside = 0, regular = 1, chaotic = 2 };

struct GridOptions {
    int n{201};        // points per axis
    double span{2.0};  // grid covers [-span, span]^2
    double t_end{5000.0};
    double renorm_dt{1.0};
    double lambda_threshold{0.0};  // 0 = automatic
    int workers{1};
    IntegrateOptions ode{};
};

struct ClassicalityGrid {
    ModelParams params;
    double eps{0.0};
    int n{0};
    double span{2.0};
    double t_end{0.0};
    double threshold{0.0};
    double chaos_fraction{0.0};  // shell-weighted chaotic share of the accessible cells
    Eigen::MatrixXd lambda;      // exponent per cell, -1 where inaccessible
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> status;

    double coord(int i) const { return -span + 2.0 * span * i / (n - 1.0); }
    CellStatus at(int i, int k) const { return static_cast<CellStatus>(status(i, k)); }
};

// classify every accessible (Q, P) cell by the exponent of the orbit started
// on the outer oscillator turning branch (q = q_plus, p = 0)
ClassicalityGrid classicality_grid(const ModelParams& p, double eps,
                                   const GridOptions& opts = {});

// connected same-status patches (4-neighbor); weight is the patch share of
// the shell weight summed over accessible cells, sorted descending. When
// labels is given it receives the index of each cell's patch in the returned
// list, -1 on inaccessible cells.
struct GridComponent {
    CellStatus kind{CellStatus::outside};
    double weight{0.0};
};
std::vector<GridComponent> grid_components(const ClassicalityGrid& g,
                                           Eigen::MatrixXi* labels = nullptr);

// binary grid snapshot so downstream stages can reuse a finished map
void save_grid(const std::string& path, const ClassicalityGrid& g);
ClassicalityGrid load_grid(const std::string& path);

}  // namespace dicke::classical
