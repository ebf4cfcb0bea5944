#include "apdsync/sync_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace apdsync {

ErrorSeries error_signals(const Trajectory& osc_a, const Trajectory& osc_b) {
    if (osc_a.dim() != 2 || osc_b.dim() != 2)
        throw RangeError("error_signals: expected single-oscillator trajectories [n, sq]");
    if (osc_a.size() != osc_b.size() || osc_a.times != osc_b.times)
        throw RangeError("error_signals: time grids are not aligned (resample first)");

    ErrorSeries out;
    const std::size_t n = osc_a.size();
    out.times = osc_a.times;
    out.e_nb.resize(n);
    out.e_b2.resize(n);
    out.e_sigma.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double na = osc_a.states[k][0].real();
        const double nb = osc_b.states[k][0].real();
        const Complex sqa = osc_a.states[k][1];
        const Complex sqb = osc_b.states[k][1];
        out.e_nb[k] = na - nb;
        out.e_b2[k] = sqa - sqb;
        out.e_sigma[k] = sigma_from_moments(na, sqa).sigma_x -
                         sigma_from_moments(nb, sqb).sigma_x;
    }
    return out;
}

double analytic_error_nb(double e0, double Gamma, double t) {
    return e0 * std::exp(-Gamma * t);
}

Complex analytic_error_b2(Complex e0, double Gamma, double phase_integral, double t) {
    return e0 * std::exp(-Gamma * t) * std::exp(Complex(0.0, -phase_integral));
}

namespace {

void check_series(std::span<const double> times, std::span<const double> a,
                  std::span<const double> b) {
    if (times.size() != a.size() || times.size() != b.size())
        throw RangeError("series lengths are not aligned");
    if (times.size() < 2) throw RangeError("series needs at least two samples");
}

} // namespace

double avg_sync_error(std::span<const double> times, std::span<const double> e_sigma,
                      std::span<const double> sigma1x, double t0, bool integrate_abs) {
    check_series(times, e_sigma, sigma1x);
    if (t0 > times.back())
        throw RangeError("avg_sync_error: t0 beyond the end of the series");
    const double start = std::max(t0, times.front());

    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        if (times[k + 1] <= start) continue;
        double ta = times[k], tb = times[k + 1];
        double ea = e_sigma[k], eb = e_sigma[k + 1];
        double sa = sigma1x[k], sb = sigma1x[k + 1];
        if (ta < start) {
            const double w = (start - ta) / (tb - ta);
            ea += w * (eb - ea);
            sa += w * (sb - sa);
            ta = start;
        }
        const double h = tb - ta;
        num += 0.5 * h * (integrate_abs ? std::abs(ea) + std::abs(eb) : ea + eb);
        den += 0.5 * h * (sa + sb);
    }
    if (!(den > 0.0))
        throw NumericsError("avg_sync_error: sigma integral is not positive");
    return std::abs(num) / den;
}

std::optional<double> sync_time(std::span<const double> times,
                                std::span<const double> e_sigma,
                                std::span<const double> sigma1x, double rel_threshold) {
    check_series(times, e_sigma, sigma1x);
    if (!(rel_threshold > 0.0))
        throw ConfigError("sync_time: rel_threshold must be > 0");

    auto below = [&](std::size_t k) {
        const double e = std::abs(e_sigma[k]);
        const double s = sigma1x[k];
        if (s > 0.0) return e / s < rel_threshold;
        return e == 0.0;
    };

    std::size_t k = times.size();
    while (k > 0 && below(k - 1)) --k;
    if (k == times.size()) return std::nullopt; // last sample already violates
    return times[k];
}

void EmbeddingConfig::validate() const {
    if (!(tau > 0.0)) throw ConfigError("EmbeddingConfig: tau must be > 0");
    if (dim < 2) throw ConfigError("EmbeddingConfig: dim must be >= 2");
    if (!(resample_dt > 0.0)) throw ConfigError("EmbeddingConfig: resample_dt must be > 0");
}

Embedding delay_embed(std::span<const double> series, const EmbeddingConfig& cfg) {
    cfg.validate();
    const double ratio = cfg.tau / cfg.resample_dt;
    const auto lag = static_cast<std::size_t>(std::llround(ratio));
    if (lag == 0 || std::abs(ratio - static_cast<double>(lag)) > 1e-6 * ratio)
        throw ConfigError("delay_embed: tau must be an integer multiple of resample_dt");
    const std::size_t span_needed = static_cast<std::size_t>(cfg.dim - 1) * lag;
    if (series.size() <= span_needed)
        throw RangeError("delay_embed: series too short for dim and tau");

    Embedding out;
    out.dim = cfg.dim;
    const std::size_t n_points = series.size() - span_needed;
    out.data.resize(n_points * static_cast<std::size_t>(cfg.dim));
    for (std::size_t k = 0; k < n_points; ++k)
        for (int d = 0; d < cfg.dim; ++d)
            out.data[k * static_cast<std::size_t>(cfg.dim) + static_cast<std::size_t>(d)] =
                series[k + static_cast<std::size_t>(d) * lag];
    return out;
}

std::string to_string(const RegimeLabel& label) {
    switch (label.kind) {
        case RegimeLabel::Kind::Period:
            return "period-" + std::to_string(label.period);
        case RegimeLabel::Kind::Chaotic:
            return "chaotic";
        case RegimeLabel::Kind::Undetermined:
            return "undetermined";
    }
    return "undetermined";
}

namespace {

/// Local maxima with 3-point parabolic refinement of the peak value.
std::vector<double> refined_peak_values(std::span<const double> x) {
    std::vector<double> vals;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (x[i] > x[i - 1] && x[i] >= x[i + 1]) {
            const double a = 0.5 * (x[i - 1] + x[i + 1]) - x[i];
            const double b = 0.5 * (x[i + 1] - x[i - 1]);
            vals.push_back(a != 0.0 ? x[i] - (b * b) / (4.0 * a) : x[i]);
        }
    }
    return vals;
}

std::size_t count_clusters(std::vector<double> vals, double rel_tol) {
    std::sort(vals.begin(), vals.end());
    const double scale =
        std::max({std::abs(vals.front()), std::abs(vals.back()),
                  std::numeric_limits<double>::min()});
    std::size_t k = 1;
    for (std::size_t i = 1; i < vals.size(); ++i)
        if (vals[i] - vals[i - 1] > rel_tol * scale) ++k;
    return k;
}

} // namespace

PeriodDetection detect_period_details(std::span<const double> values, double dt,
                                      double steady_window, double rel_tol, int k_max) {
    if (!(dt > 0.0)) throw ConfigError("detect_period: dt must be > 0");
    if (!(rel_tol > 0.0)) throw ConfigError("detect_period: rel_tol must be > 0");
    const auto window = static_cast<std::size_t>(std::llround(steady_window / dt)) + 1;
    if (values.size() < 3) throw RangeError("detect_period: series too short");
    if (window > values.size())
        throw RangeError("detect_period: series does not cover the steady window");
    const std::span<const double> tail = values.subspan(values.size() - window);

    PeriodDetection out;
    const std::vector<double> peaks = refined_peak_values(tail);
    out.peak_count = peaks.size();
    if (peaks.empty()) {
        const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
        const double scale = std::max({std::abs(*lo), std::abs(*hi),
                                       std::numeric_limits<double>::min()});
        if (*hi - *lo <= rel_tol * scale) {
            out.label = {RegimeLabel::Kind::Period, 1, std::nullopt};
        } else {
            out.label = {RegimeLabel::Kind::Undetermined, 0, std::nullopt};
        }
        return out;
    }
    out.cluster_count = count_clusters(peaks, rel_tol);
    if (out.cluster_count <= static_cast<std::size_t>(k_max)) {
        out.label = {RegimeLabel::Kind::Period, static_cast<int>(out.cluster_count),
                     std::nullopt};
    } else {
        out.overflow = true;
        out.label = {RegimeLabel::Kind::Undetermined, 0, std::nullopt};
    }
    return out;
}

RegimeLabel detect_period(std::span<const double> values, double dt, double steady_window,
                          double rel_tol, int k_max) {
    return detect_period_details(values, dt, steady_window, rel_tol, k_max).label;
}

double estimate_lyapunov(const Embedding& points, double resample_dt,
                         const LyapunovSettings& settings) {
    const std::size_t n = points.size();
    if (n < 1000) throw RangeError("estimate_lyapunov: need at least 1000 embedded points");
    if (!(resample_dt > 0.0)) throw ConfigError("estimate_lyapunov: resample_dt must be > 0");
    const auto dim = static_cast<std::size_t>(points.dim);

    const std::size_t max_offset =
        settings.max_offset > 0 ? settings.max_offset : std::min<std::size_t>(n / 5, 500);
    const std::size_t usable = n - max_offset; // indices whose forward orbit stays in range
    if (usable < 2) throw RangeError("estimate_lyapunov: series too short for max_offset");

    const std::size_t ref_stride = std::max<std::size_t>(1, usable / settings.max_refs);
    const double* data = points.data.data();

    auto dist2 = [&](std::size_t a, std::size_t b) {
        double acc = 0.0;
        const double* pa = data + a * dim;
        const double* pb = data + b * dim;
        for (std::size_t d = 0; d < dim; ++d) {
            const double diff = pa[d] - pb[d];
            acc += diff * diff;
        }
        return acc;
    };

    std::vector<double> log_sum(max_offset + 1, 0.0);
    std::vector<std::size_t> log_cnt(max_offset + 1, 0);
    constexpr double kTinyDist = 1e-280;

    for (std::size_t i = 0; i < usable; i += ref_stride) {
        // nearest neighbor outside the Theiler window
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = usable;
        for (std::size_t j = 0; j < usable; ++j) {
            const std::size_t sep = (i > j) ? i - j : j - i;
            if (sep <= settings.theiler) continue;
            const double d2 = dist2(i, j);
            if (d2 < best) {
                best = d2;
                best_j = j;
            }
        }
        if (best_j == usable) continue;
        for (std::size_t k = 0; k <= max_offset; ++k) {
            const double d = std::sqrt(dist2(i + k, best_j + k));
            log_sum[k] += std::log(std::max(d, kTinyDist));
            log_cnt[k] += 1;
        }
    }

    std::vector<double> curve(max_offset + 1);
    for (std::size_t k = 0; k <= max_offset; ++k) {
        if (log_cnt[k] == 0) return 0.0;
        curve[k] = log_sum[k] / static_cast<double>(log_cnt[k]);
    }

    // Fit the initial linear region: up to a third of the way to the curve's
    // maximum (saturation), at least 5 samples.
    const std::size_t k_peak = static_cast<std::size_t>(
        std::distance(curve.begin(), std::max_element(curve.begin(), curve.end())));
    const std::size_t k_lo = 1;
    const std::size_t k_hi = std::max<std::size_t>(k_lo + 4, k_peak / 3);
    if (k_hi >= curve.size()) return 0.0;

    const double rise = *std::max_element(curve.begin() + static_cast<std::ptrdiff_t>(k_lo),
                                          curve.begin() + static_cast<std::ptrdiff_t>(k_hi) + 1) -
                        curve[k_lo];
    constexpr double kNoiseFloorNats = 0.05;
    if (rise < kNoiseFloorNats) return 0.0; // no resolvable divergence

    // least-squares slope over [k_lo, k_hi]
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(k_hi - k_lo + 1);
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        const double x = static_cast<double>(k);
        sx += x;
        sy += curve[k];
        sxx += x * x;
        sxy += x * curve[k];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return slope / resample_dt;
}

RegimeLabel classify_regime(std::span<const double> values, double dt,
                            const ClassifySettings& settings) {
    PeriodDetection det = detect_period_details(values, dt, settings.steady_window,
                                                settings.peak_rel_tol, settings.k_max);
    if (!det.overflow) return det.label;

    const auto window = static_cast<std::size_t>(std::llround(settings.steady_window / dt)) + 1;
    const std::span<const double> tail = values.subspan(values.size() - window);
    EmbeddingConfig emb;
    emb.tau = settings.tau;
    emb.dim = settings.dim;
    emb.resample_dt = dt;
    const double ratio = emb.tau / dt;
    auto lag = static_cast<std::size_t>(std::llround(ratio));
    if (lag == 0) lag = 1;
    emb.tau = static_cast<double>(lag) * dt; // snap to the sample grid

    RegimeLabel label;
    try {
        const Embedding embedded = delay_embed(tail, emb);
        LyapunovSettings lya;
        lya.theiler = lag * static_cast<std::size_t>(settings.dim);
        const double lambda = estimate_lyapunov(embedded, dt, lya);
        label.lyapunov = lambda;
        if (lambda > settings.lyapunov_threshold) {
            label.kind = RegimeLabel::Kind::Chaotic;
        } else {
            label.kind = RegimeLabel::Kind::Undetermined;
        }
    } catch (const RangeError&) {
        label.kind = RegimeLabel::Kind::Undetermined; // window too short for the test
    }
    return label;
}

} // namespace apdsync
