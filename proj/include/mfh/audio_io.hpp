#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "mfh/error.hpp"

namespace mfh {

/// Decoded mono PCM. Samples are normalized to [-1, 1].
struct AudioBuffer {
    std::vector<double> samples;
    int sample_rate = 0;

    double duration_seconds() const {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

enum class Window { Rectangular, Hamming };

/// Analysis framing parameters. frame_len must be a power of two,
/// 0 < hop <= frame_len.
struct FrameSpec {
    std::size_t frame_len = 2048;
    std::size_t hop = 512;
    Window window = Window::Hamming;
};

/// Decode a RIFF/WAVE file: PCM 8/16/24-bit or IEEE float 32-bit, 1-2
/// channels. Integer samples are scaled by the type's max magnitude,
/// stereo is averaged to mono.
AudioBuffer load_wav(const std::filesystem::path& path);

/// Slice a buffer into windowed frames. Frame count is
/// floor((len - frame_len) / hop) + 1; the trailing remainder is dropped.
std::vector<std::vector<double>> frame_signal(const AudioBuffer& buf, const FrameSpec& spec);

/// Window coefficient w[n] for the given window of length n_total.
double window_coefficient(Window w, std::size_t n, std::size_t n_total);

} // namespace mfh
