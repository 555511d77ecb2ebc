#pragma once

// Time-series analysis for concurrence / fidelity curves: peak picking,
// carrier frequency, slow-envelope period and log-log regression.

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ladder/errors.hpp"

namespace ladder {

class TimeSeries {
public:
    TimeSeries(std::vector<double> times, std::vector<double> values)
        : times_(std::move(times)), values_(std::move(values)) {
        if (times_.size() != values_.size()) throw std::invalid_argument("time series: length mismatch");
        if (times_.size() >= 2) {
            const double dt = (times_.back() - times_.front()) / static_cast<double>(times_.size() - 1);
            if (!(dt > 0.0)) throw std::invalid_argument("time series: times must increase");
            const double tol = 1e-12 * std::max(1.0, std::abs(times_.back()));
            for (std::size_t k = 0; k < times_.size(); ++k) {
                if (k > 0 && !(times_[k] > times_[k - 1]))
                    throw std::invalid_argument("time series: times must increase strictly");
                if (std::abs(times_[k] - (times_.front() + static_cast<double>(k) * dt)) > tol)
                    throw std::invalid_argument("time series: sampling is not uniform");
            }
        }
    }

    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double step() const {
        return size() < 2 ? 0.0 : (times_.back() - times_.front()) / static_cast<double>(size() - 1);
    }

private:
    std::vector<double> times_;
    std::vector<double> values_;
};

struct Peak {
    double time;
    double value;
    double prominence;
    std::size_t index;  // sample index of the discrete maximum
};

namespace detail {

struct LocalMaximum {
    std::size_t index;
    double prominence;
};

// Interior local maxima (plateaus reported at their middle sample) with their
// topographic prominence: height above the higher of the two lowest points
// reached before meeting a strictly higher sample on either side.
inline std::vector<LocalMaximum> local_maxima(std::span<const double> y) {
    const std::size_t n = y.size();
    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(y[i - 1] < y[i])) continue;
        std::size_t j = i;
        while (j + 1 < n && y[j + 1] == y[i]) ++j;
        if (j + 1 < n && y[j + 1] < y[i]) peaks.push_back((i + j) / 2);
        i = j;
    }
    if (peaks.empty()) return {};

    // Sparse table for range minima.
    std::vector<std::vector<double>> table{std::vector<double>(y.begin(), y.end())};
    for (std::size_t w = 1; 2 * w <= n; w *= 2) {
        const auto& prev = table.back();
        std::vector<double> next(n - 2 * w + 1);
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = std::min(prev[i], prev[i + w]);
        table.push_back(std::move(next));
    }
    auto range_min = [&](std::size_t lo, std::size_t hi) {  // inclusive
        const auto level = static_cast<std::size_t>(std::bit_width(hi - lo + 1) - 1);
        return std::min(table[level][lo], table[level][hi + 1 - (std::size_t{1} << level)]);
    };

    // Nearest strictly higher sample on each side (monotonic stacks).
    std::vector<std::size_t> left_higher(n, n), right_higher(n, n);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n; ++i) {
        while (!stack.empty() && y[stack.back()] <= y[i]) stack.pop_back();
        left_higher[i] = stack.empty() ? n : stack.back();
        stack.push_back(i);
    }
    stack.clear();
    for (std::size_t i = n; i-- > 0;) {
        while (!stack.empty() && y[stack.back()] <= y[i]) stack.pop_back();
        right_higher[i] = stack.empty() ? n : stack.back();
        stack.push_back(i);
    }

    std::vector<LocalMaximum> out;
    out.reserve(peaks.size());
    for (std::size_t p : peaks) {
        const std::size_t lo = left_higher[p] == n ? 0 : left_higher[p] + 1;
        const std::size_t hi = right_higher[p] == n ? n - 1 : right_higher[p] - 1;
        const double base = std::max(range_min(lo, p), range_min(p, hi));
        out.push_back({p, y[p] - base});
    }
    return out;
}

// Vertex of the parabola through (-1, y0), (0, y1), (1, y2).
inline std::pair<double, double> parabolic_vertex(double y0, double y1, double y2) {
    const double den = y0 - 2.0 * y1 + y2;
    if (den == 0.0) return {0.0, y1};
    const double offset = std::clamp(0.5 * (y0 - y2) / den, -0.5, 0.5);
    return {offset, y1 - 0.25 * (y0 - y2) * offset};
}

}  // namespace detail

// Local maxima with prominence >= min_prominence, each refined by quadratic
// interpolation through the three samples around the discrete maximum.
inline std::vector<Peak> find_peaks(const TimeSeries& series, double min_prominence) {
    if (series.size() < 3) throw std::invalid_argument("find_peaks needs at least 3 samples");
    const auto& y = series.values();
    const double dt = series.step();
    std::vector<Peak> out;
    for (const auto& m : detail::local_maxima(y)) {
        if (m.prominence < min_prominence) continue;
        const auto [offset, value] = detail::parabolic_vertex(y[m.index - 1], y[m.index], y[m.index + 1]);
        out.push_back({series.times()[m.index] + offset * dt, value, m.prominence, m.index});
    }
    return out;
}

// Angular frequency of the strongest non-DC spectral component of the
// mean-subtracted series. The series is Hann-windowed and zero-padded 8x;
// the peak bin is refined by a parabola through the log magnitudes.
inline double dominant_frequency(const TimeSeries& series) {
    const std::size_t n = series.size();
    if (n < 16) throw InsufficientData("dominant_frequency: series too short");
    const auto& v = series.values();
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);

    std::size_t padded = std::bit_ceil(n) * 8;
    std::vector<double> x(padded, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                              static_cast<double>(n - 1));
        x[k] = (v[k] - mean) * w;
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, x);

    std::vector<double> mag(padded / 2);
    for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(spectrum[k]);
    const auto best = static_cast<std::size_t>(std::max_element(mag.begin() + 1, mag.end() - 1) - mag.begin());
    if (!(mag[best] > 0.0)) throw InsufficientData("dominant_frequency: series has no oscillating component");

    const double tiny = std::numeric_limits<double>::min();
    const auto [offset, unused] = detail::parabolic_vertex(std::log(mag[best - 1] + tiny), std::log(mag[best]),
                                                           std::log(mag[best + 1] + tiny));
    (void)unused;
    const double duration = series.step() * static_cast<double>(n);
    const double omega = 2.0 * std::numbers::pi * (static_cast<double>(best) + offset) /
                         (series.step() * static_cast<double>(padded));
    if (omega * duration / (2.0 * std::numbers::pi) < 10.0)
        throw InsufficientData("dominant_frequency: fewer than 10 periods in the series");
    return omega;
}

// The carrier's peak frequency as the fast frequency: the spectral peak of a
// concurrence curve is reported unchanged. Kept as a named step so the
// convention is explicit at call sites.
inline double fast_frequency_from_spectrum(double spectral_peak) { return spectral_peak; }

struct EnvelopeOptions {
    double carrier_prominence = 0.05;
    // Moving average over this many carrier peaks.
    int smoothing = 5;
    // The first envelope maximum whose prominence is at least this fraction
    // of the most prominent one is taken as t*.
    double major_fraction = 0.5;
    // Envelopes flatter than this (relative to their level) have no maximum.
    double min_relative_prominence = 1e-7;
};

struct EnvelopeMaximum {
    double t_star;
    double value;
    double prominence;
    std::size_t carrier_peaks;
};

// First maximum of the envelope traced by the carrier peaks.
inline EnvelopeMaximum envelope_first_maximum(const TimeSeries& series, const EnvelopeOptions& opt = {}) {
    if (opt.smoothing < 1) throw std::invalid_argument("envelope smoothing must be >= 1");
    const auto carrier = find_peaks(series, opt.carrier_prominence);
    const auto w = static_cast<std::size_t>(opt.smoothing);
    if (carrier.size() < w + 2) throw InsufficientData("envelope: too few carrier peaks");

    const std::size_t m = carrier.size() - w + 1;
    std::vector<double> env_t(m), env_v(m);
    for (std::size_t i = 0; i < m; ++i) {
        double st = 0.0, sv = 0.0;
        for (std::size_t j = i; j < i + w; ++j) {
            st += carrier[j].time;
            sv += carrier[j].value;
        }
        env_t[i] = st / static_cast<double>(w);
        env_v[i] = sv / static_cast<double>(w);
    }

    const auto maxima = detail::local_maxima(env_v);
    if (maxima.empty()) throw InsufficientData("envelope: no maximum inside the series");
    double top = 0.0;
    for (const auto& mx : maxima) top = std::max(top, mx.prominence);
    const double level = *std::max_element(env_v.begin(), env_v.end(),
                                           [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (top <= opt.min_relative_prominence * std::abs(level))
        throw InsufficientData("envelope: envelope is flat");
    for (const auto& mx : maxima)
        if (mx.prominence >= opt.major_fraction * top)
            return {env_t[mx.index], env_v[mx.index], mx.prominence, carrier.size()};
    throw InsufficientData("envelope: no maximum inside the series");  // unreachable
}

// Slow period T = 2 t*.
inline double envelope_period(const TimeSeries& series, const EnvelopeOptions& opt = {}) {
    return 2.0 * envelope_first_maximum(series, opt).t_star;
}

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::optional<double> alpha;
};

// Ordinary least squares of log y on log x.
inline FitResult loglog_fit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("loglog_fit: length mismatch");
    if (xs.size() < 3) throw std::invalid_argument("loglog_fit needs at least 3 points");
    const auto n = static_cast<double>(xs.size());
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw std::invalid_argument("loglog_fit: values must be positive");
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("loglog_fit: x values are all equal");
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return fit;
}

}  // namespace ladder
