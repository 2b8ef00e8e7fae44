// trajectory.cpp - odeint drivers for orbits, sections, and tangent growth
#include "dicke/trajectory.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <stdexcept>

namespace dicke::classical {

namespace {

namespace ode = boost::numeric::odeint;

using Arr4 = std::array<double, 4>;
using Arr8 = std::array<double, 8>;

constexpr double edge_theta = 1e-7;  // in-flight chart-degeneracy cutoff

template <class Arr>
auto make_stepper(const IntegrateOptions& o) {
    return ode::make_controlled(o.abs_tol, o.rel_tol, ode::runge_kutta_fehlberg78<Arr>());
}

struct OrbitSystem {
    const ModelParams& p;
    void operator()(const Arr4& x, Arr4& dxdt, double) const {
        const State d = flow(p, State(x[0], x[1], x[2], x[3]));
        dxdt = {d[0], d[1], d[2], d[3]};
    }
};

// orbit plus one tangent vector, for the growth-rate drivers
struct TangentSystem {
    const ModelParams& p;
    void operator()(const Arr8& x, Arr8& dxdt, double) const {
        const State s(x[0], x[1], x[2], x[3]);
        const State d = flow(p, s);
        const Eigen::Vector4d dv = flow_jacobian(p, s) * Eigen::Vector4d(x[4], x[5], x[6], x[7]);
        dxdt = {d[0], d[1], d[2], d[3], dv[0], dv[1], dv[2], dv[3]};
    }
};

}  // namespace

FlightLog integrate(const ModelParams& p, const State& x0, double t_end,
                    const IntegrateOptions& opts) {
    FlightLog log;
    Arr4 x{x0[0], x0[1], x0[2], x0[3]};
    const double e0 = hamiltonian(p, x0);
    const OrbitSystem sys{p};
    auto stepper = make_stepper<Arr4>(opts);
    double t = 0.0;
    try {
        while (t < t_end) {
            const double t1 = std::min(t + opts.sample_dt, t_end);
            ode::integrate_adaptive(stepper, sys, x, t, t1, opts.dt0);
            t = t1;
            const State s(x[0], x[1], x[2], x[3]);
            if (!s.allFinite() || theta(s[2], s[3]) < edge_theta) {
                log.escaped = true;
                break;
            }
            log.max_drift = std::max(log.max_drift, std::abs(hamiltonian(p, s) - e0));
        }
    } catch (const std::domain_error&) {
        log.escaped = true;
    }
    log.end = State(x[0], x[1], x[2], x[3]);
    return log;
}

std::vector<std::array<double, 2>> poincare_section(const ModelParams& p, const State& x0,
                                                    double t_end, int max_points,
                                                    const IntegrateOptions& opts) {
    std::vector<std::array<double, 2>> pts;
    Arr4 x{x0[0], x0[1], x0[2], x0[3]};
    const OrbitSystem sys{p};
    auto stepper = make_stepper<Arr4>(opts);
    // cap the step length so a whole dip of p below zero cannot hide inside one step
    const double dt_cap = 0.2;
    double t = 0.0, dt = std::min(opts.dt0, dt_cap);
    try {
        while (t < t_end && static_cast<int>(pts.size()) < max_points) {
            const Arr4 xp = x;
            const double tp = t;
            if (stepper.try_step(sys, x, t, dt) == ode::fail) continue;
            dt = std::min(dt, dt_cap);
            if (!(xp[1] > 0.0 && x[1] <= 0.0)) continue;

            // bracket the crossing time by fresh propagation from the pre-step state
            double lo = 0.0, hi = t - tp;
            Arr4 xc = x;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                xc = xp;
                double tc = tp;
                auto fine = make_stepper<Arr4>(opts);
                ode::integrate_adaptive(fine, sys, xc, tc, tp + mid, opts.dt0);
                if (std::abs(xc[1]) <= 1e-10 || hi - lo < 1e-15) break;
                (xc[1] > 0.0 ? lo : hi) = mid;
            }
            pts.push_back({xc[2], xc[3]});
        }
    } catch (const std::domain_error&) {
        // orbit left the chart; return what was collected
    }
    return pts;
}

LyapunovResult max_lyapunov(const ModelParams& p, const State& x0, double t_end,
                            const IntegrateOptions& opts, double renorm_dt, double threshold) {
    LyapunovResult out;
    out.threshold = threshold > 0.0 ? threshold : std::max(10.0 / t_end, 0.005);
    Arr8 x{x0[0], x0[1], x0[2], x0[3], 0.5, 0.5, 0.5, 0.5};
    const TangentSystem sys{p};
    auto stepper = make_stepper<Arr8>(opts);
    double sum = 0.0, t = 0.0;
    try {
        while (t < t_end) {
            const double t1 = std::min(t + renorm_dt, t_end);
            ode::integrate_adaptive(stepper, sys, x, t, t1, opts.dt0);
            t = t1;
            const double r2 = x[4] * x[4] + x[5] * x[5] + x[6] * x[6] + x[7] * x[7];
            if (!std::isfinite(r2) || r2 == 0.0 || theta(x[2], x[3]) < edge_theta) {
                out.escaped = true;
                break;
            }
            const double r = std::sqrt(r2);
            sum += std::log(r);
            for (int k = 4; k < 8; ++k) x[k] /= r;
        }
    } catch (const std::domain_error&) {
        out.escaped = true;
    }
    out.lambda = std::max(0.0, sum / (t > 0.0 ? t : 1.0));
    out.chaotic = !out.escaped && out.lambda > out.threshold;
    return out;
}

}  // namespace dicke::classical
