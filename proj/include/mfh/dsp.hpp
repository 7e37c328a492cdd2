#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mfh/audio_io.hpp"
#include "mfh/error.hpp"

namespace mfh {

/// One-sided magnitude spectrum of a real frame: bins 0 .. N/2,
/// bin k sits at frequency k * bin_hz.
struct Spectrum {
    std::vector<double> magnitudes;
    double bin_hz = 0.0;

    double nyquist() const { return bin_hz * static_cast<double>(magnitudes.size() - 1); }
};

/// Triangular mel filterbank. weights is n_filters x (frame_len/2 + 1),
/// peaks equally spaced on the mel scale between f_min and f_max.
struct MelFilterbank {
    std::size_t n_filters = 0;
    std::size_t n_bins = 0;
    std::vector<double> weights; // row-major, n_filters rows
    double f_min = 0.0;
    double f_max = 0.0;

    double weight(std::size_t filter, std::size_t bin) const {
        return weights[filter * n_bins + bin];
    }
};

struct TempoEstimate {
    double bpm = 0.0;
    bool fallback = false; // true when no periodicity was found and the default was used
};

double mel_from_hz(double hz);
double hz_from_mel(double mel);

/// Fraction of adjacent sample pairs whose signs differ; sign(0) counts
/// as nonnegative. In [0, 1].
double zero_crossing_rate(std::span<const double> frame);

/// One-sided magnitude spectrum via an in-place radix-2 transform.
/// Frame length must be a power of two.
Spectrum dft_magnitude(std::span<const double> frame, int sample_rate);

/// Magnitude-weighted mean frequency in Hz. Throws SilentFrame when all
/// magnitudes are zero; callers skip such frames.
double spectral_centroid(const Spectrum& spec);

MelFilterbank build_mel_filterbank(std::size_t n_filters, std::size_t frame_len,
                                   int sample_rate, double f_min, double f_max);

/// First n_mfcc coefficients of the orthonormal DCT-II of
/// log(mel energies + 1e-10).
std::vector<double> mfcc(const Spectrum& spec, const MelFilterbank& bank, std::size_t n_mfcc);

/// Tempo from the autocorrelation of the half-wave-rectified spectral
/// flux, searched over 40-200 BPM. Needs at least 5 seconds of audio.
/// Flat onset curves return the 120 BPM default with the fallback flag set.
TempoEstimate estimate_tempo(const AudioBuffer& buf, const FrameSpec& spec);

/// Pitch by normalized autocorrelation over lags covering 50-2000 Hz.
/// Returns nullopt (unvoiced) when the best peak is below 0.3.
std::optional<double> estimate_pitch(std::span<const double> frame, int sample_rate);

} // namespace mfh
