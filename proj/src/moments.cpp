#include "apdsync/moments.hpp"

#include <cmath>
#include <string>

namespace apdsync {

void OscillatorParams::validate() const {
    if (!(Omega > 0.0)) throw ConfigError("OscillatorParams: Omega must be > 0");
    if (!(Gamma > 0.0)) throw ConfigError("OscillatorParams: Gamma must be > 0");
    if (!(g >= 0.0)) throw ConfigError("OscillatorParams: g must be >= 0");
    if (!(T >= 0.0)) throw ConfigError("OscillatorParams: T must be >= 0");
}

StateVector MomentState::to_vector() const {
    return {Complex(n1, 0.0), Complex(n2, 0.0), c12, a12, sq1, sq2};
}

MomentState MomentState::from_vector(const StateVector& v) {
    if (v.size() != 6) throw RangeError("MomentState: expected 6 components");
    MomentState m;
    m.n1 = v[0].real();
    m.n2 = v[1].real();
    m.c12 = v[2];
    m.a12 = v[3];
    m.sq1 = v[4];
    m.sq2 = v[5];
    return m;
}

void MomentState::validate_physical() const {
    if (!(n1 >= 0.0) || !(n2 >= 0.0))
        throw NumericsError("MomentState: occupations must be non-negative");
    const double tol = 1e-12;
    if (std::abs(sq1) > std::sqrt(n1 * (n1 + 1.0)) * (1.0 + tol) + tol)
        throw NumericsError("MomentState: |<b1^2>| exceeds sqrt(n1(n1+1))");
    if (std::abs(sq2) > std::sqrt(n2 * (n2 + 1.0)) * (1.0 + tol) + tol)
        throw NumericsError("MomentState: |<b2^2>| exceeds sqrt(n2(n2+1))");
    if (std::norm(c12) > n1 * n2 * (1.0 + tol) + tol)
        throw NumericsError("MomentState: |<b1'b2>|^2 exceeds n1 n2");
}

double effective_frequency(const OscillatorParams& p, double s) {
    if (!(s >= 0.0)) throw NumericsError("effective_frequency: drive value must be >= 0");
    const double Op = p.Omega + p.g * s;
    if (!(Op > 0.0))
        throw NumericsError("effective_frequency: non-positive result " + std::to_string(Op));
    return Op;
}

double thermal_occupation(const PhysicalConstants& c, double Omega_prime, double T) {
    if (!(Omega_prime > 0.0))
        throw NumericsError("thermal_occupation: Omega' must be > 0");
    if (!(T >= 0.0)) throw NumericsError("thermal_occupation: T must be >= 0");
    if (T == 0.0) return 0.0;
    const double x = c.hbar * Omega_prime / (c.k_B * T);
    if (x > 700.0) return 0.0; // exp would overflow; occupation below 1e-304
    return 1.0 / std::expm1(x);
}

MomentState moments_rhs(const MomentState& m, double Op1, double Op2,
                        const OscillatorParams& p1, const OscillatorParams& p2,
                        double nth1, double nth2) {
    const Complex i(0.0, 1.0);
    const double Gbar = 0.5 * (p1.Gamma + p2.Gamma);
    MomentState d;
    d.n1 = -p1.Gamma * m.n1 + p1.Gamma * nth1;
    d.n2 = -p2.Gamma * m.n2 + p2.Gamma * nth2;
    d.c12 = (-i * (-Op1 + Op2) - Gbar) * m.c12;
    d.a12 = (-i * (Op1 + Op2) - Gbar) * m.a12;
    d.sq1 = (-2.0 * i * Op1 - p1.Gamma) * m.sq1;
    d.sq2 = (-2.0 * i * Op2 - p2.Gamma) * m.sq2;
    return d;
}

Trajectory simulate_moments(const MomentState& m0, const DriveSignal& drive,
                            const OscillatorParams& p1, const OscillatorParams& p2,
                            double t_end, const IntegrationSettings& integ,
                            const PhysicalConstants& consts) {
    p1.validate();
    p2.validate();
    m0.validate_physical();
    if (!(t_end > 0.0)) throw ConfigError("simulate_moments: t_end must be > 0");

    const Complex i(0.0, 1.0);
    const double Gbar = 0.5 * (p1.Gamma + p2.Gamma);
    RhsFn rhs = [&drive, p1, p2, consts, i, Gbar](double t, const StateVector& y,
                                                  StateVector& dydt) {
        dydt.resize(6);
        const auto [s1, s2] = drive(t);
        const double Op1 = effective_frequency(p1, s1);
        const double Op2 = effective_frequency(p2, s2);
        const double nth1 = thermal_occupation(consts, Op1, p1.T);
        const double nth2 = thermal_occupation(consts, Op2, p2.T);
        dydt[0] = -p1.Gamma * y[0] + p1.Gamma * nth1;
        dydt[1] = -p2.Gamma * y[1] + p2.Gamma * nth2;
        dydt[2] = (-i * (-Op1 + Op2) - Gbar) * y[2];
        dydt[3] = (-i * (Op1 + Op2) - Gbar) * y[3];
        dydt[4] = (-2.0 * i * Op1 - p1.Gamma) * y[4];
        dydt[5] = (-2.0 * i * Op2 - p2.Gamma) * y[5];
    };

    if (integ.scheme == IntegrationSettings::Scheme::FixedRk4) {
        if (!(integ.dt > 0.0))
            throw ConfigError("simulate_moments: fixed scheme requires dt > 0");
        return integrate_fixed(rhs, m0.to_vector(), 0.0, t_end, integ.dt, integ.record_stride);
    }
    return integrate_adaptive(rhs, m0.to_vector(), 0.0, t_end, integ.tol, integ.record_stride);
}

SigmaPair sigma_from_moments(double n, Complex sq) {
    const double rx = 0.5 + n + sq.real();
    const double rp = 0.5 + n - sq.real();
    const double slack = -1e-12 * (0.5 + std::abs(n));
    if (rx < slack || rp < slack)
        throw NumericsError("sigma_from_moments: negative radicand (unphysical moments)");
    return {std::sqrt(std::max(rx, 0.0)), std::sqrt(std::max(rp, 0.0))};
}

std::pair<SigmaPair, SigmaPair> std_devs(const MomentState& m) {
    return {sigma_from_moments(m.n1, m.sq1), sigma_from_moments(m.n2, m.sq2)};
}

double init_from_sigma(double sigma_x0) {
    const double n = sigma_x0 * sigma_x0 - 0.5;
    if (n < -1e-12)
        throw NumericsError("init_from_sigma: sigma_x below the vacuum value sqrt(1/2)");
    return std::max(n, 0.0);
}

MomentState moment_state_from_sigmas(double sigma1_x0, double sigma2_x0) {
    MomentState m;
    m.n1 = init_from_sigma(sigma1_x0);
    m.n2 = init_from_sigma(sigma2_x0);
    return m;
}

Trajectory oscillator_subtrajectory(const Trajectory& joint, int which) {
    if (joint.dim() != 6)
        throw RangeError("oscillator_subtrajectory: expected a 6-component moment trajectory");
    if (which != 0 && which != 1)
        throw RangeError("oscillator_subtrajectory: which must be 0 or 1");
    const std::size_t n_idx = (which == 0) ? 0u : 1u;
    const std::size_t sq_idx = (which == 0) ? 4u : 5u;
    return joint.component_slice({n_idx, sq_idx});
}

} // namespace apdsync
