#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mfh/error.hpp"

namespace mfh {

/// Fixed-width binary word, most significant bit first. Track encodings
/// are 8 bits wide; evaluation rows may use other widths.
class BinaryPattern {
public:
    explicit BinaryPattern(std::vector<std::uint8_t> bits);
    static BinaryPattern from_string(std::string_view bits); // "0"/"1" characters
    static BinaryPattern from_bipolar(std::span<const double> components);

    std::size_t width() const { return bits_.size(); }
    std::uint8_t bit(std::size_t i) const { return bits_[i]; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    unsigned long decode() const; // unsigned MSB-first value
    std::vector<double> bipolar() const;
    std::string to_string() const;
    std::size_t hamming(const BinaryPattern& other) const; // WidthMismatch

    bool operator==(const BinaryPattern&) const = default;

private:
    std::vector<std::uint8_t> bits_;
};

/// 8-bit MSB-first encoding of n in [0, 255].
BinaryPattern to_binary_pattern(unsigned n);

/// bit 1 -> +1, bit 0 -> -1.
std::vector<double> to_bipolar(const BinaryPattern& p);

/// floor of the affine map (value - lo)/(hi - lo) * 255, clamped to
/// [0, 255]. With (lo=0, hi=255) this is floor(value) clamped.
unsigned quantize_to_byte(double value, double lo, double hi);

/// Per-track scalar features.
struct FeatureSummary {
    std::string track_id;
    std::string label;
    double beat = 0.0;      // BPM
    double fft_stat = 0.0;  // mean spectral centroid, Hz
    double mfcc_stat = 0.0; // mean of cepstral coefficient 1 across frames
    double pitch = 0.0;     // median of voiced frames, Hz
    double zcr_mean = 0.0;
    bool beat_fallback = false;
    bool pitch_unvoiced = false; // no voiced frame; pitch forced to 0
};

/// Per-frame features of one track, before aggregation.
struct TrackFrameFeatures {
    std::vector<double> zcr;
    std::vector<double> centroid; // silent frames omitted
    std::vector<std::vector<double>> mfcc;
    std::vector<std::optional<double>> pitch; // nullopt = unvoiced frame
    double tempo_bpm = 0.0;
    bool tempo_fallback = false;
};

FeatureSummary summarize_track(const std::string& track_id, const std::string& label,
                               const TrackFrameFeatures& frames);

enum class Feature { Beat, Fft, Mfcc, Pitch };

/// Quantization ranges per classifier feature, fitted on the training
/// split and then frozen.
struct FeatureQuantizer {
    double lo[4] = {0.0, 0.0, 0.0, 0.0};
    double hi[4] = {255.0, 255.0, 255.0, 255.0};

    /// Identity ranges: floor(value) clamped to a byte.
    static FeatureQuantizer byte_identity();
    /// Min/max per feature over the given tracks; a degenerate range is
    /// widened by 1 so quantization stays defined.
    static FeatureQuantizer fit(std::span<const FeatureSummary> tracks);

    double value_of(const FeatureSummary& s, Feature f) const;
    unsigned quantize(const FeatureSummary& s, Feature f) const;
};

struct PatternEntry {
    std::vector<double> input;  // bipolar
    std::vector<double> target; // bipolar
    std::string label;
};

struct PatternSet {
    std::vector<PatternEntry> entries;

    std::size_t input_width() const { return entries.empty() ? 0 : entries[0].input.size(); }
    std::size_t target_width() const { return entries.empty() ? 0 : entries[0].target.size(); }
};

inline const std::vector<Feature> kClassifierFeatures = {Feature::Beat, Feature::Fft,
                                                         Feature::Mfcc, Feature::Pitch};

/// One (input, target) pair per track: input is the concatenated bipolar
/// byte encodings of the selected features, target the bipolar class code.
PatternSet build_pattern_set(std::span<const FeatureSummary> tracks,
                             const std::map<std::string, BinaryPattern>& class_codes,
                             const FeatureQuantizer& quantizer,
                             const std::vector<Feature>& features = kClassifierFeatures);

/// Sorted labels get codes 1, 2, 3, ... as 8-bit patterns.
std::map<std::string, BinaryPattern> default_class_codes(std::span<const std::string> labels);

// Features CSV: header track_id,label,beat,fft_stat,mfcc_stat,pitch,zcr_mean
void write_features_csv(std::ostream& out, std::span<const FeatureSummary> tracks);
std::vector<FeatureSummary> read_features_csv(std::istream& in);

// Patterns file: JSON list of {input, target, label} with 0/1 strings.
void write_patterns_json(std::ostream& out, const PatternSet& set);
PatternSet read_patterns_json(std::istream& in);

} // namespace mfh
