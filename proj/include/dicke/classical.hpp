// classical.hpp - mean-field energy surface, flow field, and shell geometry
#pragma once

#include <Eigen/Dense>

#include "dicke/model.hpp"

namespace dicke::classical {

// Phase-space point (q, p, Q, P): oscillator quadratures first, then the
// atomic plane. The atomic pair lives on the disk Q^2 + P^2 < 4.
using State = Eigen::Vector4d;

// sqrt(1 - (Q^2 + P^2)/4); zero on the disk edge where the chart degenerates
double theta(double Q, double P);

// energy per spin
double hamiltonian(const ModelParams& p, const State& x);

// canonical equations, (dq, dp, dQ, dP)/dt
State flow(const ModelParams& p, const State& x);

// derivative of the flow with respect to the state, for tangent dynamics
Eigen::Matrix4d flow_jacobian(const ModelParams& p, const State& x);

// larger oscillator root of h(q, 0, Q, P) = eps; NaN when the shell misses
// this atomic point
double q_plus(const ModelParams& p, double eps, double Q, double P);

// derivative with respect to eps of the oscillator-plane area enclosed by the
// shell at fixed (Q, P): the microcanonical weight of the atomic cell
double shell_weight(const ModelParams& p, double eps, double Q, double P);

// lowest energy of the surface over the whole phase space
double ground_energy(const ModelParams& p);

}  // namespace dicke::classical
