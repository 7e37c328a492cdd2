#include "mfh/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

namespace mfh {

namespace {

constexpr double kLogFloor = 1e-10;
constexpr double kDefaultBpm = 120.0;
constexpr double kBpmMin = 40.0;
constexpr double kBpmMax = 200.0;
constexpr double kPitchMinHz = 50.0;
constexpr double kPitchMaxHz = 2000.0;
constexpr double kVoicingThreshold = 0.3;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 decimation-in-time transform, in place.
void fft_inplace(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

std::vector<double> magnitude_spectrum(std::span<const double> frame) {
    if (!is_pow2(frame.size()))
        throw Error(Err::NonPowerOfTwoLength, "frame length must be a power of two");
    std::vector<std::complex<double>> a(frame.begin(), frame.end());
    fft_inplace(a);
    std::vector<double> mags(frame.size() / 2 + 1);
    for (std::size_t k = 0; k < mags.size(); ++k)
        mags[k] = std::abs(a[k]);
    return mags;
}

// Parabolic vertex refinement around a discrete peak; returns the
// fractional offset in [-0.5, 0.5].
double parabolic_offset(double left, double mid, double right) {
    const double denom = left - 2.0 * mid + right;
    if (denom == 0.0)
        return 0.0;
    double off = 0.5 * (left - right) / denom;
    return std::clamp(off, -0.5, 0.5);
}

} // namespace

double mel_from_hz(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double hz_from_mel(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

double zero_crossing_rate(std::span<const double> frame) {
    if (frame.size() < 2)
        throw Error(Err::FrameTooShort, "need at least 2 samples for a crossing rate");
    std::size_t crossings = 0;
    bool prev_nonneg = frame[0] >= 0.0;
    for (std::size_t t = 1; t < frame.size(); ++t) {
        const bool nonneg = frame[t] >= 0.0;
        if (nonneg != prev_nonneg)
            ++crossings;
        prev_nonneg = nonneg;
    }
    return static_cast<double>(crossings) / static_cast<double>(frame.size() - 1);
}

Spectrum dft_magnitude(std::span<const double> frame, int sample_rate) {
    Spectrum spec;
    spec.magnitudes = magnitude_spectrum(frame);
    spec.bin_hz = static_cast<double>(sample_rate) / static_cast<double>(frame.size());
    return spec;
}

double spectral_centroid(const Spectrum& spec) {
    double weighted = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < spec.magnitudes.size(); ++k) {
        weighted += static_cast<double>(k) * spec.bin_hz * spec.magnitudes[k];
        total += spec.magnitudes[k];
    }
    if (total == 0.0)
        throw Error(Err::SilentFrame, "all-zero spectrum has no centroid");
    return weighted / total;
}

MelFilterbank build_mel_filterbank(std::size_t n_filters, std::size_t frame_len,
                                   int sample_rate, double f_min, double f_max) {
    if (n_filters < 2)
        throw Error(Err::InvalidBand, "need at least 2 mel filters");
    if (!(f_min < f_max) || f_max > sample_rate / 2.0 || f_min < 0.0)
        throw Error(Err::InvalidBand, "require 0 <= f_min < f_max <= Nyquist");
    if (!is_pow2(frame_len))
        throw Error(Err::NonPowerOfTwoLength, "frame length must be a power of two");

    MelFilterbank bank;
    bank.n_filters = n_filters;
    bank.n_bins = frame_len / 2 + 1;
    bank.f_min = f_min;
    bank.f_max = f_max;
    bank.weights.assign(n_filters * bank.n_bins, 0.0);

    // n_filters + 2 points equally spaced in mel; filter i peaks at point
    // i+1 and falls to zero at points i and i+2.
    const double mel_lo = mel_from_hz(f_min);
    const double mel_hi = mel_from_hz(f_max);
    std::vector<double> edges(n_filters + 2);
    for (std::size_t i = 0; i < edges.size(); ++i)
        edges[i] = hz_from_mel(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                            static_cast<double>(n_filters + 1));

    const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(frame_len);
    for (std::size_t i = 0; i < n_filters; ++i) {
        const double lo = edges[i], peak = edges[i + 1], hi = edges[i + 2];
        for (std::size_t k = 0; k < bank.n_bins; ++k) {
            const double f = static_cast<double>(k) * bin_hz;
            double w = 0.0;
            if (f >= lo && f <= peak && peak > lo)
                w = (f - lo) / (peak - lo);
            else if (f > peak && f <= hi && hi > peak)
                w = (hi - f) / (hi - peak);
            bank.weights[i * bank.n_bins + k] = w;
        }
    }
    return bank;
}

std::vector<double> mfcc(const Spectrum& spec, const MelFilterbank& bank, std::size_t n_mfcc) {
    if (spec.magnitudes.size() != bank.n_bins)
        throw Error(Err::DimensionMismatch, "filterbank built for a different frame length");
    if (n_mfcc == 0 || n_mfcc > bank.n_filters)
        throw Error(Err::DimensionMismatch, "n_mfcc must be in [1, n_filters]");

    std::vector<double> log_energy(bank.n_filters);
    for (std::size_t i = 0; i < bank.n_filters; ++i) {
        double e = 0.0;
        for (std::size_t k = 0; k < bank.n_bins; ++k)
            e += bank.weights[i * bank.n_bins + k] * spec.magnitudes[k];
        log_energy[i] = std::log(e + kLogFloor);
    }

    // Orthonormal DCT-II.
    const std::size_t n = bank.n_filters;
    std::vector<double> coeffs(n_mfcc);
    for (std::size_t k = 0; k < n_mfcc; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += log_energy[i] *
                   std::cos(std::numbers::pi * static_cast<double>(k) *
                            (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(n)));
        const double scale = k == 0 ? std::sqrt(1.0 / static_cast<double>(n))
                                    : std::sqrt(2.0 / static_cast<double>(n));
        coeffs[k] = scale * acc;
    }
    return coeffs;
}

TempoEstimate estimate_tempo(const AudioBuffer& buf, const FrameSpec& spec) {
    if (buf.sample_rate <= 0 || buf.duration_seconds() < 5.0)
        throw Error(Err::SignalTooShort, "tempo estimation needs at least 5 seconds");

    const auto frames = frame_signal(buf, spec);

    // Onset strength: half-wave-rectified spectral flux between frames.
    std::vector<double> onset(frames.size(), 0.0);
    std::vector<double> prev = magnitude_spectrum(frames[0]);
    for (std::size_t t = 1; t < frames.size(); ++t) {
        std::vector<double> cur = magnitude_spectrum(frames[t]);
        double flux = 0.0;
        for (std::size_t k = 0; k < cur.size(); ++k)
            flux += std::max(0.0, cur[k] - prev[k]);
        onset[t] = flux;
        prev = std::move(cur);
    }

    const double mean = std::accumulate(onset.begin(), onset.end(), 0.0) /
                        static_cast<double>(onset.size());
    for (double& o : onset)
        o -= mean;

    const double frame_rate = static_cast<double>(buf.sample_rate) / static_cast<double>(spec.hop);
    const auto lag_min = static_cast<std::size_t>(std::ceil(60.0 * frame_rate / kBpmMax));
    const auto lag_max = static_cast<std::size_t>(std::floor(60.0 * frame_rate / kBpmMin));
    if (lag_min < 1 || lag_max + 1 >= onset.size())
        throw Error(Err::SignalTooShort, "onset curve too short for the tempo range");

    auto autocorr = [&](std::size_t lag) {
        double acc = 0.0;
        for (std::size_t t = 0; t + lag < onset.size(); ++t)
            acc += onset[t] * onset[t + lag];
        return acc;
    };

    const double energy = autocorr(0);
    if (energy <= 0.0)
        return {kDefaultBpm, true};

    // Smooth with a 3-point average so that peaks split by frame
    // quantization merge into one bump.
    std::vector<double> smoothed(lag_max + 2, 0.0);
    std::vector<double> raw(lag_max + 2, 0.0);
    for (std::size_t lag = (lag_min > 1 ? lag_min - 1 : 1); lag <= lag_max + 1; ++lag)
        raw[lag] = autocorr(lag);
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag)
        smoothed[lag] = (raw[lag - 1] + raw[lag] + raw[lag + 1]) / 3.0;

    double best = *std::max_element(smoothed.begin() + static_cast<long>(lag_min),
                                    smoothed.begin() + static_cast<long>(lag_max) + 1);
    if (best <= 1e-12 * energy)
        return {kDefaultBpm, true};

    // The subharmonic of a periodic onset curve scores as high as the
    // fundamental, so take the smallest qualifying local maximum.
    std::size_t chosen = 0;
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
        const double here = smoothed[lag];
        const double left = lag > lag_min ? smoothed[lag - 1] : -1.0;
        const double right = lag < lag_max ? smoothed[lag + 1] : -1.0;
        if (here >= left && here >= right && here >= 0.75 * best) {
            chosen = lag;
            break;
        }
    }
    if (chosen == 0)
        return {kDefaultBpm, true};

    double frac = static_cast<double>(chosen);
    if (chosen > lag_min && chosen < lag_max)
        frac += parabolic_offset(smoothed[chosen - 1], smoothed[chosen], smoothed[chosen + 1]);

    double bpm = 60.0 * frame_rate / frac;
    bpm = std::clamp(bpm, kBpmMin, kBpmMax);
    return {bpm, false};
}

std::optional<double> estimate_pitch(std::span<const double> frame, int sample_rate) {
    const auto lag_max = static_cast<std::size_t>(std::ceil(sample_rate / kPitchMinHz));
    const auto lag_min =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(sample_rate / kPitchMaxHz)));
    if (frame.size() < 2 * lag_max)
        throw Error(Err::FrameTooShort, "frame must cover two periods of the lowest pitch");

    const std::size_t n = frame.size();
    std::vector<double> r(lag_max + 1, 0.0);
    // Normalized autocorrelation: r(L) = sum x_t x_{t+L} / sqrt(E0 * EL)
    // over the overlapping region.
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
        double cross = 0.0, e0 = 0.0, e1 = 0.0;
        for (std::size_t t = 0; t + lag < n; ++t) {
            cross += frame[t] * frame[t + lag];
            e0 += frame[t] * frame[t];
            e1 += frame[t + lag] * frame[t + lag];
        }
        const double denom = std::sqrt(e0 * e1);
        r[lag] = denom > 0.0 ? cross / denom : 0.0;
    }

    double r_max = -1.0;
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag)
        r_max = std::max(r_max, r[lag]);
    if (r_max < kVoicingThreshold)
        return std::nullopt;

    // All multiples of the period peak near r_max; the fundamental is the
    // smallest local maximum within a whisker of the global one.
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
        const double left = lag > lag_min ? r[lag - 1] : -2.0;
        const double right = lag < lag_max ? r[lag + 1] : -2.0;
        if (r[lag] >= left && r[lag] >= right && r[lag] >= 0.9 * r_max)
            return static_cast<double>(sample_rate) / static_cast<double>(lag);
    }
    return static_cast<double>(sample_rate) / static_cast<double>(lag_max);
}

} // namespace mfh
