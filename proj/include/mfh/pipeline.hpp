#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mfh/audio_io.hpp"
#include "mfh/dsp.hpp"
#include "mfh/encoding.hpp"
#include "mfh/hebbnet.hpp"

namespace mfh {

/// Everything the pipeline commands need, loadable from a flat
/// `key = value` file with `#` comments. Every key has a default.
struct PipelineConfig {
    // framing
    std::size_t frame_len = 2048;
    std::size_t hop = 512;
    Window window = Window::Hamming;
    // mfcc
    std::size_t n_mels = 26;
    std::size_t n_mfcc = 13;
    double f_min = 0.0;
    double f_max = 0.0; // 0 = Nyquist
    // encoding
    bool quantize_fixed_byte = false; // true: floor(value) into a byte; false: fit min/max on train
    std::map<std::string, std::string> class_code_overrides; // label -> 0/1 string
    // training
    TrainConfig train;
    bool bias_input = false;
    // split
    double split_ratio = 0.66;
    std::uint64_t seed = 42;
    // extraction
    unsigned workers = 0; // 0 = logical cores

    FrameSpec frame_spec() const { return {frame_len, hop, window}; }
    double f_max_or_nyquist(int sample_rate) const {
        return f_max > 0.0 ? f_max : sample_rate / 2.0;
    }

    void validate() const;

    /// Defaults, then the file (when given), then the MFH_SEED override.
    static PipelineConfig load(const std::filesystem::path* file);
};

/// Decode one file and reduce it to per-track scalars.
FeatureSummary extract_track(const std::filesystem::path& wav, const std::string& track_id,
                             const std::string& label, const PipelineConfig& cfg);

} // namespace mfh
