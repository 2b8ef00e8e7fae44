// classical.cpp - closed-form pieces of the mean-field limit
#include "dicke/classical.hpp"

#include <cmath>
#include <numbers>
#include <limits>
#include <stdexcept>

namespace dicke::classical {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

// coupling amplitude U(q, p) and its q/p partials
struct Coupling {
    double u, uq, up, uqq, upp;
};

Coupling coupling(const ModelParams& p, double q, double pp) {
    const double g = p.gamma;
    if (p.f == 1) return {2.0 * g * q, 2.0 * g, 0.0, 0.0, 0.0};
    return {g * (q * q - pp * pp), 2.0 * g * q, -2.0 * g * pp, 2.0 * g, -2.0 * g};
}

}  // namespace

double theta(double Q, double P) {
    const double s = 1.0 - 0.25 * (Q * Q + P * P);
    return s > 0.0 ? std::sqrt(s) : 0.0;
}

double hamiltonian(const ModelParams& p, const State& x) {
    const double q = x[0], pp = x[1], Q = x[2], P = x[3];
    const auto c = coupling(p, q, pp);
    return 0.5 * p.omega * (q * q + pp * pp) + 0.5 * p.omega0 * (Q * Q + P * P) - p.omega0 +
           c.u * Q * theta(Q, P);
}

State flow(const ModelParams& p, const State& x) {
    const double q = x[0], pp = x[1], Q = x[2], P = x[3];
    const double th = theta(Q, P);
    if (th <= 0.0) throw std::domain_error("flow: state outside the atomic disk");
    const auto c = coupling(p, q, pp);
    const double w = Q * th;
    const double wq = th - Q * Q / (4.0 * th);
    const double wp = -Q * P / (4.0 * th);
    State d;
    d[0] = p.omega * pp + c.up * w;           // dq/dt = h_p
    d[1] = -(p.omega * q + c.uq * w);         // dp/dt = -h_q
    d[2] = p.omega0 * P + c.u * wp;           // dQ/dt = h_P
    d[3] = -(p.omega0 * Q + c.u * wq);        // dP/dt = -h_Q
    return d;
}

Eigen::Matrix4d flow_jacobian(const ModelParams& p, const State& x) {
    const double q = x[0], pp = x[1], Q = x[2], P = x[3];
    const double th = theta(Q, P);
    if (th <= 0.0) throw std::domain_error("flow_jacobian: state outside the atomic disk");
    const auto c = coupling(p, q, pp);
    const double th3 = th * th * th;
    const double w = Q * th;
    const double wq = th - Q * Q / (4.0 * th);
    const double wp = -Q * P / (4.0 * th);
    const double wqq = -0.75 * Q / th - Q * Q * Q / (16.0 * th3);
    const double wqp = -0.25 * P / th - P * Q * Q / (16.0 * th3);
    const double wpp = -0.25 * Q / th - Q * P * P / (16.0 * th3);

    const double hqq = p.omega + c.uqq * w;
    const double hpp = p.omega + c.upp * w;
    const double hqQ = c.uq * wq;
    const double hqP = c.uq * wp;
    const double hpQ = c.up * wq;
    const double hpP = c.up * wp;
    const double hQQ = p.omega0 + c.u * wqq;
    const double hQP = c.u * wqp;
    const double hPP = p.omega0 + c.u * wpp;

    Eigen::Matrix4d jac;
    jac << 0.0, hpp, hpQ, hpP,                 // d/dx of h_p
        -hqq, 0.0, -hqQ, -hqP,                 // d/dx of -h_q
        hqP, hpP, hQP, hPP,                    // d/dx of h_P
        -hqQ, -hpQ, -hQQ, -hQP;                // d/dx of -h_Q
    return jac;
}

double q_plus(const ModelParams& p, double eps, double Q, double P) {
    const double th = theta(Q, P);
    const double w = Q * th;
    const double k = eps + p.omega0 - 0.5 * p.omega0 * (Q * Q + P * P);
    if (p.f == 1) {
        const double disc = 4.0 * p.gamma * p.gamma * w * w + 2.0 * p.omega * k;
        if (disc < 0.0) return nan_v;
        return (-2.0 * p.gamma * w + std::sqrt(disc)) / p.omega;
    }
    const double a = 0.5 * p.omega + p.gamma * w;  // positive while gamma < omega/2
    if (k < 0.0) return nan_v;
    return std::sqrt(k / a);
}

double shell_weight(const ModelParams& p, double eps, double Q, double P) {
    const double th = theta(Q, P);
    const double w = Q * th;
    const double k = eps + p.omega0 - 0.5 * p.omega0 * (Q * Q + P * P);
    if (p.f == 1) {
        const double disc = 4.0 * p.gamma * p.gamma * w * w + 2.0 * p.omega * k;
        return disc > 0.0 ? 2.0 * std::numbers::pi / p.omega : 0.0;
    }
    if (k <= 0.0) return 0.0;
    const double a = 0.5 * p.omega + p.gamma * w;
    const double b = 0.5 * p.omega - p.gamma * w;
    return std::numbers::pi / std::sqrt(a * b);
}

double ground_energy(const ModelParams& p) {
    // at p = P = 0 the oscillator minimizes analytically; scan the Q interval
    const auto profile = [&](double Q) {
        const double th = theta(Q, 0.0);
        const double base = 0.5 * p.omega0 * Q * Q - p.omega0;
        if (p.f == 2) return base;  // minimum sits at q = 0 while gamma < omega/2
        const double w = Q * th;
        return base - 2.0 * p.gamma * p.gamma * w * w / p.omega;
    };
    double best_q = 0.0, best = profile(0.0);
    const int steps = 40001;
    for (int i = 0; i < steps; ++i) {
        const double Q = -2.0 + 4.0 * i / (steps - 1.0);
        const double v = profile(Q);
        if (v < best) {
            best = v;
            best_q = Q;
        }
    }
    // parabolic polish around the grid winner
    double h = 4.0 / (steps - 1.0);
    double x = best_q;
    for (int it = 0; it < 40; ++it) {
        const double f0 = profile(x - h), f1 = profile(x), f2 = profile(x + h);
        const double denom = f0 - 2.0 * f1 + f2;
        if (std::abs(denom) > 1e-300) {
            const double shift = 0.5 * h * (f0 - f2) / denom;
            if (std::abs(shift) < h) x += shift;
        }
        h *= 0.5;
    }
    return std::min(best, profile(x));
}

}  // namespace dicke::classical
