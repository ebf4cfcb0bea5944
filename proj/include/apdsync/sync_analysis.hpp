#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "apdsync/integrator.hpp"
#include "apdsync/moments.hpp"

namespace apdsync {

/// Pointwise synchronization differences between two oscillators.
struct ErrorSeries {
    std::vector<double> times;
    std::vector<double> e_nb;     ///< n_a - n_b
    std::vector<Complex> e_b2;    ///< sq_a - sq_b
    std::vector<double> e_sigma;  ///< sigma_x(a) - sigma_x(b)
};

/// Differences of two single-oscillator moment trajectories (layout
/// [n, sq], see oscillator_subtrajectory). The time grids must be identical;
/// otherwise a RangeError is thrown.
ErrorSeries error_signals(const Trajectory& osc_a, const Trajectory& osc_b);

/// Closed-form occupation-difference decay e(t) = e0 exp(-Gamma t), exact for
/// identical oscillator parameters under any drive.
double analytic_error_nb(double e0, double Gamma, double t);

/// Closed-form squeezing-difference evolution
/// e(t) = e0 exp(-Gamma t) exp(-i phase_integral) with
/// phase_integral = integral of 2 Omega'(t') over [0, t]. The modulus decays
/// at rate Gamma; the frequency enters the phase only.
Complex analytic_error_b2(Complex e0, double Gamma, double phase_integral, double t);

/// E_avg = |int_{t0}^{end} e dt| / int_{t0}^{end} sigma1x dt by trapezoidal
/// quadrature on the sample grid (boundary interval split exactly at t0).
/// integrate_abs switches the numerator to int |e| dt (sensitivity variant,
/// not the default).
double avg_sync_error(std::span<const double> times, std::span<const double> e_sigma,
                      std::span<const double> sigma1x, double t0,
                      bool integrate_abs = false);

/// Earliest sample time after which |e_sigma|/sigma1x stays below
/// rel_threshold for the remainder of the series; nullopt if it never does.
std::optional<double> sync_time(std::span<const double> times,
                                std::span<const double> e_sigma,
                                std::span<const double> sigma1x, double rel_threshold);

struct EmbeddingConfig {
    double tau = 0.3e-9;         ///< delay, seconds
    int dim = 3;                 ///< embedding dimension, >= 2
    double resample_dt = 0.03e-9;///< uniform resampling step, seconds

    void validate() const;
};

/// Delay-embedded points, row-major.
struct Embedding {
    int dim = 0;
    std::vector<double> data;

    std::size_t size() const { return dim > 0 ? data.size() / static_cast<std::size_t>(dim) : 0; }
    std::span<const double> point(std::size_t k) const {
        return {data.data() + k * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
};

/// v_k = (x_k, x_{k+lag}, ..., x_{k+(dim-1) lag}) with lag = tau/resample_dt,
/// which must be an integer multiple (resample the series first otherwise).
/// Output length = N - (dim-1) lag.
Embedding delay_embed(std::span<const double> series, const EmbeddingConfig& cfg);

/// Dynamical-regime label of a scalar readout.
struct RegimeLabel {
    enum class Kind { Period, Chaotic, Undetermined };
    Kind kind = Kind::Undetermined;
    int period = 0;                   ///< valid when kind == Period
    std::optional<double> lyapunov;   ///< 1/s, when estimated

    bool is_period(int k) const { return kind == Kind::Period && period == k; }
};

/// "period-1", "period-2", ..., "chaotic", "undetermined".
std::string to_string(const RegimeLabel& label);

struct PeriodDetection {
    RegimeLabel label;
    std::size_t peak_count = 0;
    std::size_t cluster_count = 0;
    bool overflow = false; ///< more clusters than k_max: defer to a Lyapunov test
};

/// Finds local maxima (parabola-refined) in the trailing steady_window of a
/// uniformly sampled series and clusters their values with relative tolerance
/// rel_tol. k clusters -> Period(k) for k <= k_max; more clusters defers to a
/// Lyapunov test (overflow). No maxima -> Period(1) if the window is constant
/// within rel_tol, else Undetermined.
PeriodDetection detect_period_details(std::span<const double> values, double dt,
                                      double steady_window, double rel_tol, int k_max = 8);

RegimeLabel detect_period(std::span<const double> values, double dt,
                          double steady_window, double rel_tol, int k_max = 8);

struct LyapunovSettings {
    std::size_t theiler = 10;     ///< neighbor exclusion window, samples
    std::size_t max_offset = 0;   ///< divergence-following horizon, samples (0 = auto)
    std::size_t max_refs = 2000;  ///< reference-point subsample cap
};

/// Largest-Lyapunov-exponent estimate by nearest-neighbor divergence
/// (Rosenstein): mean log separation growth of nearest-neighbor pairs, slope
/// of the initial linear region divided by resample_dt. Returns 0 when the
/// divergence curve rises by less than a noise floor (no resolvable
/// divergence, e.g. on a periodic orbit). Requires >= 1000 points.
double estimate_lyapunov(const Embedding& points, double resample_dt,
                         const LyapunovSettings& settings = {});

struct ClassifySettings {
    double steady_window = 0.0;     ///< seconds of trailing window
    double peak_rel_tol = 1e-3;
    int k_max = 8;
    double tau = 0.3e-9;            ///< embedding delay for the Lyapunov test
    int dim = 3;
    double lyapunov_threshold = 0.0;///< chaotic iff lambda > threshold
};

/// Full decision tree: detect_period, escalating cluster overflow to a
/// Lyapunov test on the delay-embedded tail (chaotic iff the estimate is
/// positive).
RegimeLabel classify_regime(std::span<const double> values, double dt,
                            const ClassifySettings& settings);

} // namespace apdsync
