#include "apdsync/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace apdsync {

namespace {

bool finite(const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

bool finite(const StateVector& v) {
    for (const Complex& z : v) {
        if (!finite(z)) return false;
    }
    return true;
}

[[noreturn]] void throw_nonfinite(double t) {
    throw NumericsError("integration failure: non-finite derivative or state at t = " +
                        std::to_string(t) + " s");
}

} // namespace

void ToleranceSettings::validate() const {
    if (!(rtol > 0.0)) throw ConfigError("ToleranceSettings: rtol must be > 0");
    if (!(atol >= 0.0)) throw ConfigError("ToleranceSettings: atol must be >= 0");
    if (!(dt_min > 0.0) || !(dt_min <= dt_init) || !(dt_init <= dt_max))
        throw ConfigError("ToleranceSettings: require 0 < dt_min <= dt_init <= dt_max");
}

void Trajectory::push_back(double t, StateVector state, StateVector deriv) {
    if (!times.empty() && !(t > times.back()))
        throw RangeError("Trajectory: times must be strictly increasing");
    times.push_back(t);
    states.push_back(std::move(state));
    derivs.push_back(std::move(deriv));
}

std::size_t Trajectory::locate(double t) const {
    if (times.size() < 2) {
        if (times.size() == 1 && t == times.front()) return 0;
        throw RangeError("Trajectory::locate: trajectory has fewer than two samples");
    }
    const double lo = times.front();
    const double hi = times.back();
    const double slack = 1e-12 * (hi - lo);
    if (t < lo - slack || t > hi + slack)
        throw RangeError("Trajectory::locate: t = " + std::to_string(t) +
                         " s outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "] s");
    const double tc = std::clamp(t, lo, hi);
    auto it = std::upper_bound(times.begin(), times.end(), tc);
    std::size_t k = static_cast<std::size_t>(std::distance(times.begin(), it));
    if (k > 0) --k;
    if (k + 1 >= times.size()) k = times.size() - 2;
    return k;
}

void Trajectory::interpolate_into(double t, StateVector& out) const {
    if (times.size() == 1) {
        if (t != times.front())
            throw RangeError("Trajectory::interpolate: single-sample trajectory");
        out = states.front();
        return;
    }
    const std::size_t k = locate(t);
    const double t0 = times[k];
    const double t1 = times[k + 1];
    if (t == t0) { out = states[k]; return; }
    if (t == t1) { out = states[k + 1]; return; }
    const double h = t1 - t0;
    const double s = (std::clamp(t, times.front(), times.back()) - t0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    const StateVector& y0 = states[k];
    const StateVector& y1 = states[k + 1];
    const StateVector& m0 = derivs[k];
    const StateVector& m1 = derivs[k + 1];
    out.resize(y0.size());
    for (std::size_t i = 0; i < y0.size(); ++i)
        out[i] = h00 * y0[i] + (h10 * h) * m0[i] + h01 * y1[i] + (h11 * h) * m1[i];
}

StateVector Trajectory::interpolate(double t) const {
    StateVector out;
    interpolate_into(t, out);
    return out;
}

Trajectory Trajectory::component_slice(const std::vector<std::size_t>& components) const {
    Trajectory out;
    out.times = times;
    out.states.reserve(states.size());
    out.derivs.reserve(derivs.size());
    for (std::size_t k = 0; k < states.size(); ++k) {
        StateVector s(components.size());
        StateVector d(components.size());
        for (std::size_t i = 0; i < components.size(); ++i) {
            s[i] = states[k].at(components[i]);
            d[i] = derivs[k].at(components[i]);
        }
        out.states.push_back(std::move(s));
        out.derivs.push_back(std::move(d));
    }
    return out;
}

namespace {

// y_out = y + c * k
void axpy(StateVector& y_out, const StateVector& y, double c, const StateVector& k) {
    for (std::size_t i = 0; i < y.size(); ++i) y_out[i] = y[i] + c * k[i];
}

struct Rk4Workspace {
    StateVector k1, k2, k3, k4, tmp;
    explicit Rk4Workspace(std::size_t n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}
};

void rk4_step_into(const RhsFn& rhs, const StateVector& y, double t, double dt,
                   StateVector& out, Rk4Workspace& w, const StateVector* k1_precomputed) {
    const std::size_t n = y.size();
    if (k1_precomputed) {
        w.k1 = *k1_precomputed;
    } else {
        rhs(t, y, w.k1);
    }
    axpy(w.tmp, y, 0.5 * dt, w.k1);
    rhs(t + 0.5 * dt, w.tmp, w.k2);
    axpy(w.tmp, y, 0.5 * dt, w.k2);
    rhs(t + 0.5 * dt, w.tmp, w.k3);
    axpy(w.tmp, y, dt, w.k3);
    rhs(t + dt, w.tmp, w.k4);
    out.resize(n);
    const double c = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i)
        out[i] = y[i] + c * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
}

} // namespace

StateVector step_rk4(const RhsFn& rhs, const StateVector& y, double t, double dt) {
    if (!(dt > 0.0)) throw ConfigError("step_rk4: dt must be > 0");
    Rk4Workspace w(y.size());
    StateVector out;
    rk4_step_into(rhs, y, t, dt, out, w, nullptr);
    if (!finite(w.k1) || !finite(out)) throw_nonfinite(t);
    return out;
}

Trajectory integrate_fixed(const RhsFn& rhs, StateVector y0, double t0, double t1,
                           double dt, std::size_t record_stride) {
    if (!(dt > 0.0)) throw ConfigError("integrate_fixed: dt must be > 0");
    if (t1 < t0) throw ConfigError("integrate_fixed: t1 must be >= t0");
    if (record_stride == 0) record_stride = 1;

    Trajectory traj;
    const std::size_t n = y0.size();
    Rk4Workspace w(n);
    StateVector y = std::move(y0);
    StateVector deriv(n);

    rhs(t0, y, deriv);
    if (!finite(deriv) || !finite(y)) throw_nonfinite(t0);
    traj.push_back(t0, y, deriv);
    if (t1 == t0) return traj;

    StateVector y_next(n);
    double t = t0;
    std::size_t k = 0;
    while (t < t1) {
        double t_next = t0 + static_cast<double>(k + 1) * dt;
        if (t_next >= t1 - 1e-9 * dt) t_next = t1;
        const double h = t_next - t;
        // deriv currently holds rhs(t, y) = this step's first stage
        rk4_step_into(rhs, y, t, h, y_next, w, &deriv);
        if (!finite(y_next)) throw_nonfinite(t);
        y.swap(y_next);
        t = t_next;
        ++k;
        const bool last = (t == t1);
        rhs(t, y, deriv);
        if (!finite(deriv)) throw_nonfinite(t);
        if (last || k % record_stride == 0) traj.push_back(t, y, deriv);
        if (last) break;
    }
    return traj;
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double A21 = 1.0 / 5.0;
constexpr double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0;
constexpr double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0;
constexpr double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0,
                 A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0;
constexpr double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0,
                 A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0;
constexpr double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0,
                 B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0;
// b(5th) - b(4th): error-estimate weights, applied to stages 1..7
constexpr double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0,
                 E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0;
constexpr double C2 = 1.0 / 5.0, C3 = 3.0 / 10.0, C4 = 4.0 / 5.0, C5 = 8.0 / 9.0;

} // namespace

Trajectory integrate_adaptive(const RhsFn& rhs, StateVector y0, double t0, double t1,
                              const ToleranceSettings& tol, std::size_t record_stride) {
    tol.validate();
    if (t1 < t0) throw ConfigError("integrate_adaptive: t1 must be >= t0");
    if (record_stride == 0) record_stride = 1;

    Trajectory traj;
    const std::size_t n = y0.size();
    StateVector y = std::move(y0);
    StateVector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y5(n);

    rhs(t0, y, k1);
    if (!finite(k1) || !finite(y)) throw_nonfinite(t0);
    traj.push_back(t0, y, k1);
    if (t1 == t0) return traj;

    const double span = t1 - t0;
    double h = std::clamp(tol.dt_init, tol.dt_min, std::min(tol.dt_max, span));
    double t = t0;
    std::size_t accepted = 0;

    while (t < t1) {
        bool final_step = false;
        if (t + h >= t1 - 1e-12 * span) {
            h = t1 - t;
            final_step = true;
        }

        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (A21 * k1[i]);
        rhs(t + C2 * h, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        rhs(t + C3 * h, tmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        rhs(t + C4 * h, tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        rhs(t + C5 * h, tmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        rhs(t + h, tmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            y5[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        rhs(t + h, y5, k7);

        // Per-component error, real and imaginary parts separately.
        double err_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Complex e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] +
                                   E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            const double sc_re = tol.atol + tol.rtol * std::max(std::abs(y[i].real()), std::abs(y5[i].real()));
            const double sc_im = tol.atol + tol.rtol * std::max(std::abs(y[i].imag()), std::abs(y5[i].imag()));
            err_norm = std::max(err_norm, std::abs(e.real()) / sc_re);
            err_norm = std::max(err_norm, std::abs(e.imag()) / sc_im);
        }
        const bool bad = !std::isfinite(err_norm) || !finite(y5);

        if (!bad && err_norm <= 1.0) {
            t = final_step ? t1 : t + h;
            y.swap(y5);
            k1.swap(k7); // FSAL
            if (!finite(y)) throw_nonfinite(t);
            ++accepted;
            if (t >= t1 || accepted % record_stride == 0) traj.push_back(t, y, k1);
            if (t >= t1) break;
            double factor = 0.9 * std::pow(std::max(err_norm, 1e-30), -0.2);
            factor = std::clamp(factor, 0.2, 5.0);
            h = std::clamp(h * factor, tol.dt_min, tol.dt_max);
        } else {
            double factor = bad ? 0.2 : 0.9 * std::pow(err_norm, -0.2);
            factor = std::clamp(factor, 0.1, 0.9);
            const double h_new = h * factor;
            if (h_new < tol.dt_min)
                throw NumericsError("integrate_adaptive: step size fell below dt_min at t = " +
                                    std::to_string(t) + " s (stiffness or tolerance failure)");
            h = h_new;
        }
    }
    return traj;
}

} // namespace apdsync
