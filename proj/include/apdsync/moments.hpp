#pragma once

#include <utility>

#include "apdsync/controller.hpp"
#include "apdsync/integrator.hpp"

namespace apdsync {

struct PhysicalConstants {
    double hbar = 1.054571817e-34; ///< J s
    double k_B = 1.380649e-23;     ///< J/K
};

inline constexpr PhysicalConstants kCodata{};

/// One dissipative oscillator: bare frequency, damping, drive coupling
/// (frequency shift per unit drive) and bath temperature.
struct OscillatorParams {
    double Omega = 0.0; ///< rad/s
    double Gamma = 0.0; ///< rad/s
    double g = 0.0;     ///< rad/s per unit drive
    double T = 0.0;     ///< K

    void validate() const;
};

/// The six second-order moments of the oscillator pair.
/// n_j >= 0; physical initial states satisfy |sq_j| <= sqrt(n_j (n_j + 1))
/// and |c12|^2 <= n1 n2.
struct MomentState {
    double n1 = 0.0;          ///< <b1'b1>
    double n2 = 0.0;          ///< <b2'b2>
    Complex c12{0.0, 0.0};    ///< <b1'b2>
    Complex a12{0.0, 0.0};    ///< <b1 b2>
    Complex sq1{0.0, 0.0};    ///< <b1^2>
    Complex sq2{0.0, 0.0};    ///< <b2^2>

    /// Layout [n1, n2, c12, a12, sq1, sq2] (occupations carried in the real
    /// parts).
    StateVector to_vector() const;
    static MomentState from_vector(const StateVector& v);

    /// Throws NumericsError if the state is not a valid initial moment set.
    void validate_physical() const;
};

/// Quadrature standard deviations of x = (b + b')/sqrt(2),
/// p = -i(b - b')/sqrt(2).
struct SigmaPair {
    double sigma_x = 0.0;
    double sigma_p = 0.0;
};

/// Drive-shifted frequency Omega' = Omega + g * s. Throws NumericsError for
/// s < 0 or a non-positive result.
double effective_frequency(const OscillatorParams& p, double s);

/// Bose-Einstein occupation 1/(exp(hbar Omega' / (k_B T)) - 1); returns 0
/// exactly at T = 0. Throws NumericsError for Omega' <= 0.
double thermal_occupation(const PhysicalConstants& c, double Omega_prime, double T);

/// Moment equations of motion at given effective frequencies and bath
/// occupations:
///   dn_j/dt  = -Gamma_j n_j + Gamma_j nth_j
///   dc12/dt  = -i(-Op1 + Op2) c12 - ((Gamma_1+Gamma_2)/2) c12
///   da12/dt  = -i( Op1 + Op2) a12 - ((Gamma_1+Gamma_2)/2) a12
///   dsq_j/dt = (-2i Op_j - Gamma_j) sq_j
MomentState moments_rhs(const MomentState& m, double Op1, double Op2,
                        const OscillatorParams& p1, const OscillatorParams& p2,
                        double nth1, double nth2);

/// Evolves the moments under a time-dependent drive; the bath occupations are
/// re-evaluated from Omega'_j(t) at every derivative evaluation.
Trajectory simulate_moments(const MomentState& m0, const DriveSignal& drive,
                            const OscillatorParams& p1, const OscillatorParams& p2,
                            double t_end, const IntegrationSettings& integ,
                            const PhysicalConstants& consts = kCodata);

/// sigma_x = sqrt(1/2 + n + Re sq), sigma_p = sqrt(1/2 + n - Re sq).
/// Throws NumericsError on a negative radicand (broken initialization).
SigmaPair sigma_from_moments(double n, Complex sq);

/// Both oscillators' quadrature deviations.
std::pair<SigmaPair, SigmaPair> std_devs(const MomentState& m);

/// Occupation of a single oscillator prepared with <b^2> = 0 and the given
/// sigma_x: n = sigma_x^2 - 1/2. Throws NumericsError below the vacuum value
/// sqrt(1/2).
double init_from_sigma(double sigma_x0);

/// Joint initial state with both squeezing and cross moments zero.
MomentState moment_state_from_sigmas(double sigma1_x0, double sigma2_x0);

/// Per-oscillator view of a joint moment trajectory: state layout [n_j, sq_j].
/// which = 0 selects oscillator 1, which = 1 oscillator 2.
Trajectory oscillator_subtrajectory(const Trajectory& joint, int which);

} // namespace apdsync
