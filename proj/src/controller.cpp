#include "apdsync/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace apdsync {

void ControllerParams::validate() const {
    if (!(gamma_c > 0.0)) throw ConfigError("ControllerParams: gamma_c must be > 0");
    if (!(Gamma_c > 0.0)) throw ConfigError("ControllerParams: Gamma_c must be > 0");
    if (!(gamma_1 > 0.0)) throw ConfigError("ControllerParams: gamma_1 must be > 0");
    if (!(gamma_2 > 0.0)) throw ConfigError("ControllerParams: gamma_2 must be > 0");
    if (!(Omega_c > 0.0)) throw ConfigError("ControllerParams: Omega_c must be > 0");
    if (!(eps_c >= 0.0)) throw ConfigError("ControllerParams: eps_c must be >= 0");
    if (!(eps_1 >= 0.0)) throw ConfigError("ControllerParams: eps_1 must be >= 0");
    if (!(eps_2 >= 0.0)) throw ConfigError("ControllerParams: eps_2 must be >= 0");
}

StateVector ControllerState::to_vector() const {
    return {alpha_c, beta_c, alpha_1, alpha_2};
}

ControllerState ControllerState::from_vector(const StateVector& v) {
    if (v.size() != 4) throw RangeError("ControllerState: expected 4 components");
    return {v[0], v[1], v[2], v[3]};
}

ControllerState controller_rhs(const ControllerState& s, const ControllerParams& p) {
    const Complex i(0.0, 1.0);
    const double abs2_ac = std::norm(s.alpha_c);
    ControllerState d;
    d.alpha_c = -i * p.Delta_c * s.alpha_c - 0.5 * p.gamma_c * s.alpha_c -
                i * p.g_c * s.alpha_c * (s.beta_c + std::conj(s.beta_c)) + p.eps_c;
    d.beta_c = (-i * p.Omega_c - 0.5 * p.Gamma_c) * s.beta_c - i * p.g_c * abs2_ac;
    d.alpha_1 = -i * p.Delta_1 * s.alpha_1 - 0.5 * p.gamma_1 * s.alpha_1 -
                std::sqrt(p.gamma_1 * p.gamma_c) * s.alpha_c + p.eps_1;
    d.alpha_2 = -i * p.Delta_2 * s.alpha_2 - 0.5 * p.gamma_2 * s.alpha_2 -
                std::sqrt(p.gamma_2 * p.gamma_c) * s.alpha_c + p.eps_2;
    return d;
}

RhsFn make_controller_rhs(const ControllerParams& p) {
    const Complex i(0.0, 1.0);
    const double root1 = std::sqrt(p.gamma_1 * p.gamma_c);
    const double root2 = std::sqrt(p.gamma_2 * p.gamma_c);
    return [p, i, root1, root2](double /*t*/, const StateVector& y, StateVector& dydt) {
        dydt.resize(4);
        const Complex ac = y[0], bc = y[1], a1 = y[2], a2 = y[3];
        dydt[0] = -i * p.Delta_c * ac - 0.5 * p.gamma_c * ac -
                  i * p.g_c * ac * (2.0 * bc.real()) + p.eps_c;
        dydt[1] = (-i * p.Omega_c - 0.5 * p.Gamma_c) * bc - i * p.g_c * std::norm(ac);
        dydt[2] = -i * p.Delta_1 * a1 - 0.5 * p.gamma_1 * a1 - root1 * ac + p.eps_1;
        dydt[3] = -i * p.Delta_2 * a2 - 0.5 * p.gamma_2 * a2 - root2 * ac + p.eps_2;
    };
}

Trajectory simulate_controller(const ControllerParams& p, const ControllerState& initial,
                               double t_end, const IntegrationSettings& integ) {
    p.validate();
    if (!(t_end > 0.0)) throw ConfigError("simulate_controller: t_end must be > 0");
    const RhsFn rhs = make_controller_rhs(p);
    if (integ.scheme == IntegrationSettings::Scheme::FixedRk4) {
        if (!(integ.dt > 0.0))
            throw ConfigError("simulate_controller: fixed scheme requires dt > 0");
        return integrate_fixed(rhs, initial.to_vector(), 0.0, t_end, integ.dt,
                               integ.record_stride);
    }
    return integrate_adaptive(rhs, initial.to_vector(), 0.0, t_end, integ.tol,
                              integ.record_stride);
}

std::pair<double, double> DriveSignal::operator()(double t) const {
    switch (kind_) {
        case Kind::Constant:
            return {offset_, offset_};
        case Kind::Sinusoid: {
            const double s = offset_ + amplitude_ * std::cos(omega_ * t);
            return {s, s};
        }
        case Kind::FromTrajectory:
            break;
    }
    const Trajectory& tr = *traj_;
    const std::size_t k = tr.locate(t);
    const double t0 = tr.times[k];
    const double t1 = tr.times[k + 1];
    Complex a1, a2;
    if (t == t0) {
        a1 = tr.states[k][0];
        a2 = tr.states[k][1];
    } else if (t == t1) {
        a1 = tr.states[k + 1][0];
        a2 = tr.states[k + 1][1];
    } else {
        const double h = t1 - t0;
        const double s = (std::clamp(t, tr.t_front(), tr.t_back()) - t0) / h;
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        const double h10 = s3 - 2.0 * s2 + s;
        const double h01 = -2.0 * s3 + 3.0 * s2;
        const double h11 = s3 - s2;
        a1 = h00 * tr.states[k][0] + (h10 * h) * tr.derivs[k][0] +
             h01 * tr.states[k + 1][0] + (h11 * h) * tr.derivs[k + 1][0];
        a2 = h00 * tr.states[k][1] + (h10 * h) * tr.derivs[k][1] +
             h01 * tr.states[k + 1][1] + (h11 * h) * tr.derivs[k + 1][1];
    }
    return {std::norm(a1), std::norm(a2)};
}

DriveSignal drive_from_trajectory(const Trajectory& controller_traj) {
    if (controller_traj.size() < 2)
        throw ConfigError("drive_from_trajectory: trajectory needs at least two samples");
    if (controller_traj.dim() != 4 && controller_traj.dim() != 2)
        throw ConfigError("drive_from_trajectory: expected a 4-mode controller trajectory "
                          "or a 2-component [alpha_1, alpha_2] slice");
    DriveSignal d;
    d.kind_ = DriveSignal::Kind::FromTrajectory;
    if (controller_traj.dim() == 4) {
        d.traj_ = std::make_shared<const Trajectory>(controller_traj.component_slice({2, 3}));
    } else {
        d.traj_ = std::make_shared<const Trajectory>(controller_traj);
    }
    d.t_min_ = controller_traj.t_front();
    d.t_max_ = controller_traj.t_back();
    return d;
}

DriveSignal make_constant_drive(double s0) {
    if (!(s0 >= 0.0)) throw ConfigError("make_constant_drive: amplitude must be >= 0");
    DriveSignal d;
    d.kind_ = DriveSignal::Kind::Constant;
    d.offset_ = s0;
    d.t_min_ = -std::numeric_limits<double>::infinity();
    d.t_max_ = std::numeric_limits<double>::infinity();
    return d;
}

DriveSignal make_sinusoid_drive(double offset, double amplitude, double omega) {
    if (!(amplitude >= 0.0) || !(offset >= amplitude))
        throw ConfigError("make_sinusoid_drive: require 0 <= amplitude <= offset");
    DriveSignal d;
    d.kind_ = DriveSignal::Kind::Sinusoid;
    d.offset_ = offset;
    d.amplitude_ = amplitude;
    d.omega_ = omega;
    d.t_min_ = -std::numeric_limits<double>::infinity();
    d.t_max_ = std::numeric_limits<double>::infinity();
    return d;
}

} // namespace apdsync
