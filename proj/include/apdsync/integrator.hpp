#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "apdsync/errors.hpp"

namespace apdsync {

using Complex = std::complex<double>;

/// Flat complex state vector. Consumers fix the length for the lifetime of
/// one integration; every accepted sample is finite.
using StateVector = std::vector<Complex>;

/// Vector field f(t, y) -> dy/dt, written into a preallocated output of the
/// same length as y.
using RhsFn = std::function<void(double t, const StateVector& y, StateVector& dydt)>;

/// Error-control settings for the embedded 5(4) adaptive scheme.
struct ToleranceSettings {
    double rtol = 1e-9;
    double atol = 1e-12;
    double dt_init = 1e-12; ///< seconds
    double dt_min = 1e-18;  ///< seconds
    double dt_max = 1e30;   ///< seconds (clipped to the interval length)

    /// Throws ConfigError unless rtol > 0, atol >= 0 and
    /// 0 < dt_min <= dt_init <= dt_max.
    void validate() const;
};

/// Time-stamped sequence of states with the vector field evaluated at each
/// node, giving cubic Hermite dense output between nodes.
class Trajectory {
public:
    std::vector<double> times;             ///< strictly increasing, seconds
    std::vector<StateVector> states;       ///< aligned 1:1 with times
    std::vector<StateVector> derivs;       ///< rhs evaluated at each node

    std::size_t size() const { return times.size(); }
    std::size_t dim() const { return states.empty() ? 0 : states.front().size(); }
    bool empty() const { return times.empty(); }
    double t_front() const { return times.front(); }
    double t_back() const { return times.back(); }

    void push_back(double t, StateVector state, StateVector deriv);

    /// Index k of the interval [times[k], times[k+1]] bracketing t.
    /// Queries a hair outside the covered range (1e-12 of the span) are
    /// clamped; anything further throws RangeError.
    std::size_t locate(double t) const;

    /// Cubic Hermite interpolation; exact at nodes.
    StateVector interpolate(double t) const;
    void interpolate_into(double t, StateVector& out) const;

    /// New trajectory holding only the selected state components.
    Trajectory component_slice(const std::vector<std::size_t>& components) const;
};

/// One classical 4th-order Runge-Kutta step. Deterministic; throws
/// NumericsError naming t if the derivative or result is non-finite.
StateVector step_rk4(const RhsFn& rhs, const StateVector& y, double t, double dt);

/// Fixed-step RK4 over [t0, t1], sampling at t0, t0+dt, ... with the final
/// partial step shortened to land on t1 exactly. t1 == t0 yields the
/// single-sample trajectory {y0}. record_stride > 1 keeps every stride-th
/// node (plus the final one); the integration grid is unchanged.
Trajectory integrate_fixed(const RhsFn& rhs, StateVector y0, double t0, double t1,
                           double dt, std::size_t record_stride = 1);

/// Embedded Dormand-Prince 5(4) pair with per-component error control
/// err_k <= atol + rtol * |y_k| applied to real and imaginary parts
/// separately. Only accepted steps are recorded. Throws NumericsError when
/// the step size would fall below tol.dt_min.
Trajectory integrate_adaptive(const RhsFn& rhs, StateVector y0, double t0, double t1,
                              const ToleranceSettings& tol, std::size_t record_stride = 1);

} // namespace apdsync
