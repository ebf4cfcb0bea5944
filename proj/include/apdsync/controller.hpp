#pragma once

#include <memory>
#include <utility>

#include "apdsync/integrator.hpp"

namespace apdsync {

/// Parameters of the classical subsystem: the driven optomechanical
/// controller (alpha_c, beta_c) and the two intermediary cavities
/// (alpha_1, alpha_2). All angular frequencies, rad/s.
struct ControllerParams {
    double Delta_c = 0.0;  ///< controller cavity detuning
    double gamma_c = 0.0;  ///< controller cavity linewidth
    double g_c = 0.0;      ///< controller optomechanical coupling
    double Gamma_c = 0.0;  ///< controller mechanical damping
    double Omega_c = 0.0;  ///< controller mechanical frequency
    double eps_c = 0.0;    ///< controller drive strength
    double Delta_1 = 0.0, Delta_2 = 0.0;  ///< cavity detunings
    double gamma_1 = 0.0, gamma_2 = 0.0;  ///< cavity linewidths
    double eps_1 = 0.0, eps_2 = 0.0;      ///< cavity drive strengths

    void validate() const;
};

/// Complex mean-field amplitudes of the classical subsystem.
struct ControllerState {
    Complex alpha_c{0.0, 0.0};
    Complex beta_c{0.0, 0.0};
    Complex alpha_1{0.0, 0.0};
    Complex alpha_2{0.0, 0.0};

    StateVector to_vector() const;
    static ControllerState from_vector(const StateVector& v);
};

/// Mean-field equations of motion:
///   d(alpha_c)/dt = -i Delta_c alpha_c - (gamma_c/2) alpha_c
///                   - i g_c alpha_c (beta_c + conj(beta_c)) + eps_c
///   d(beta_c)/dt  = (-i Omega_c - Gamma_c/2) beta_c - i g_c |alpha_c|^2
///   d(alpha_j)/dt = -i Delta_j alpha_j - (gamma_j/2) alpha_j
///                   - sqrt(gamma_j gamma_c) alpha_c + eps_j,   j = 1, 2
ControllerState controller_rhs(const ControllerState& state, const ControllerParams& p);

/// Adapter for the generic integrator (state layout
/// [alpha_c, beta_c, alpha_1, alpha_2]).
RhsFn make_controller_rhs(const ControllerParams& p);

/// Integration scheme selection shared by the controller and moment runs.
struct IntegrationSettings {
    enum class Scheme { FixedRk4, Adaptive };
    Scheme scheme = Scheme::FixedRk4;
    double dt = 0.0;              ///< fixed-step size; must be > 0 for FixedRk4
    ToleranceSettings tol{};      ///< adaptive-scheme error control
    std::size_t record_stride = 1;
};

Trajectory simulate_controller(const ControllerParams& p, const ControllerState& initial,
                               double t_end, const IntegrationSettings& integ);

/// Pair of non-negative drive values (s_1(t), s_2(t)) on a photon-number
/// scale. Immutable and shareable across threads.
class DriveSignal {
public:
    /// Evaluate (s_1, s_2) at time t; RangeError outside the domain.
    std::pair<double, double> operator()(double t) const;

    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }

    friend DriveSignal drive_from_trajectory(const Trajectory& controller_traj);
    friend DriveSignal make_constant_drive(double s0);
    friend DriveSignal make_sinusoid_drive(double offset, double amplitude, double omega);

private:
    enum class Kind { FromTrajectory, Constant, Sinusoid };
    Kind kind_ = Kind::Constant;
    std::shared_ptr<const Trajectory> traj_;  ///< two components [alpha_1, alpha_2]
    double offset_ = 0.0;
    double amplitude_ = 0.0;
    double omega_ = 0.0;
    double t_min_ = 0.0;
    double t_max_ = 0.0;
};

/// s_j(t) = |alpha_j(t)|^2 from a simulated controller trajectory, evaluated
/// through dense interpolation of the complex amplitudes (non-negative by
/// construction).
DriveSignal drive_from_trajectory(const Trajectory& controller_traj);

/// s_1 = s_2 = s0 for all t. s0 must be >= 0.
DriveSignal make_constant_drive(double s0);

/// s_1 = s_2 = offset + amplitude * cos(omega t). Requires
/// 0 <= amplitude <= offset so the signal stays non-negative.
DriveSignal make_sinusoid_drive(double offset, double amplitude, double omega);

} // namespace apdsync
