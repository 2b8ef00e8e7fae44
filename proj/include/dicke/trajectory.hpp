// trajectory.hpp - orbit integration, surface sections, largest Lyapunov exponent
#pragma once

#include <array>
#include <vector>

#include "dicke/classical.hpp"

namespace dicke::classical {

struct IntegrateOptions {
    double abs_tol{1e-11};
    double rel_tol{1e-11};
    double dt0{1e-3};       // initial step guess
    double sample_dt{1.0};  // spacing of drift / escape checks
};

struct FlightLog {
    State end{State::Zero()};
    double max_drift{0.0};  // largest |h(x(t)) - h(x(0))| seen at the samples
    bool escaped{false};    // orbit reached the disk edge or lost smoothness
};

// propagate for t_end time units
FlightLog integrate(const ModelParams& p, const State& x0, double t_end,
                    const IntegrateOptions& opts = {});

// (Q, P) marks where the oscillator momentum crosses zero downward, which
// selects the outer turning branch of the oscillator plane
std::vector<std::array<double, 2>> poincare_section(const ModelParams& p, const State& x0,
                                                    double t_end, int max_points = 4000,
                                                    const IntegrateOptions& opts = {});

struct LyapunovResult {
    double lambda{0.0};
    double threshold{0.0};
    bool chaotic{false};
    bool escaped{false};
};

// largest Lyapunov exponent by tangent-vector growth, renormalized every
// renorm_dt; threshold 0 resolves to max(10 / t_end, 0.005)
LyapunovResult max_lyapunov(const ModelParams& p, const State& x0, double t_end = 5000.0,
                            const IntegrateOptions& opts = {}, double renorm_dt = 1.0,
                            double threshold = 0.0);

}  // namespace dicke::classical
