#include "mfh/encoding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mfh {

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

double parse_double(std::string_view s, const char* field) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(Err::ParseError, std::string("bad numeric value for ") + field);
    return v;
}

double mean(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v)
        acc += x;
    return acc / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

BinaryPattern::BinaryPattern(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    if (bits_.empty())
        throw Error(Err::InvalidArgument, "empty bit pattern");
    for (auto b : bits_)
        if (b > 1)
            throw Error(Err::InvalidArgument, "pattern bits must be 0 or 1");
}

BinaryPattern BinaryPattern::from_string(std::string_view bits) {
    std::vector<std::uint8_t> v;
    v.reserve(bits.size());
    for (char c : bits) {
        if (c != '0' && c != '1')
            throw Error(Err::ParseError, "pattern string must contain only 0 and 1");
        v.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return BinaryPattern(std::move(v));
}

BinaryPattern BinaryPattern::from_bipolar(std::span<const double> components) {
    std::vector<std::uint8_t> v;
    v.reserve(components.size());
    for (double c : components)
        v.push_back(c > 0.0 ? 1 : 0);
    return BinaryPattern(std::move(v));
}

unsigned long BinaryPattern::decode() const {
    unsigned long value = 0;
    for (auto b : bits_)
        value = value << 1 | b;
    return value;
}

std::vector<double> BinaryPattern::bipolar() const {
    std::vector<double> v;
    v.reserve(bits_.size());
    for (auto b : bits_)
        v.push_back(b ? 1.0 : -1.0);
    return v;
}

std::string BinaryPattern::to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_)
        s.push_back(static_cast<char>('0' + b));
    return s;
}

std::size_t BinaryPattern::hamming(const BinaryPattern& other) const {
    if (width() != other.width())
        throw Error(Err::WidthMismatch, "patterns have different widths");
    std::size_t d = 0;
    for (std::size_t i = 0; i < width(); ++i)
        d += bits_[i] != other.bits_[i];
    return d;
}

BinaryPattern to_binary_pattern(unsigned n) {
    if (n > 255)
        throw Error(Err::OutOfRange, "value does not fit in a byte");
    std::vector<std::uint8_t> bits(8);
    for (std::size_t i = 0; i < 8; ++i)
        bits[i] = static_cast<std::uint8_t>(n >> (7 - i) & 1u);
    return BinaryPattern(std::move(bits));
}

std::vector<double> to_bipolar(const BinaryPattern& p) { return p.bipolar(); }

unsigned quantize_to_byte(double value, double lo, double hi) {
    if (!(lo < hi))
        throw Error(Err::InvalidRange, "quantization range requires lo < hi");
    const double scaled = (value - lo) / (hi - lo) * 255.0;
    if (scaled <= 0.0)
        return 0;
    if (scaled >= 255.0)
        return 255;
    return static_cast<unsigned>(std::floor(scaled));
}

FeatureSummary summarize_track(const std::string& track_id, const std::string& label,
                               const TrackFrameFeatures& frames) {
    if (frames.zcr.empty())
        throw Error(Err::EmptyTrack, "track has no analysis frames: " + track_id);

    FeatureSummary s;
    s.track_id = track_id;
    s.label = label;
    s.beat = frames.tempo_bpm;
    s.beat_fallback = frames.tempo_fallback;
    s.zcr_mean = mean(frames.zcr);
    s.fft_stat = frames.centroid.empty() ? 0.0 : mean(frames.centroid);

    if (!frames.mfcc.empty()) {
        double acc = 0.0;
        for (const auto& c : frames.mfcc)
            acc += c.size() > 1 ? c[1] : 0.0;
        s.mfcc_stat = acc / static_cast<double>(frames.mfcc.size());
    }

    std::vector<double> voiced;
    for (const auto& p : frames.pitch)
        if (p)
            voiced.push_back(*p);
    if (voiced.empty()) {
        s.pitch = 0.0;
        s.pitch_unvoiced = true;
    } else {
        s.pitch = median(std::move(voiced));
    }
    return s;
}

FeatureQuantizer FeatureQuantizer::byte_identity() { return FeatureQuantizer{}; }

FeatureQuantizer FeatureQuantizer::fit(std::span<const FeatureSummary> tracks) {
    if (tracks.empty())
        throw Error(Err::EmptyTrack, "cannot fit quantizer on an empty track list");
    FeatureQuantizer q;
    for (int f = 0; f < 4; ++f) {
        double lo = 0.0;
        double hi = 0.0;
        bool first = true;
        for (const auto& t : tracks) {
            const double v = q.value_of(t, static_cast<Feature>(f));
            if (first) {
                lo = hi = v;
                first = false;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        if (hi <= lo)
            hi = lo + 1.0;
        q.lo[f] = lo;
        q.hi[f] = hi;
    }
    return q;
}

double FeatureQuantizer::value_of(const FeatureSummary& s, Feature f) const {
    switch (f) {
    case Feature::Beat: return s.beat;
    case Feature::Fft: return s.fft_stat;
    case Feature::Mfcc: return s.mfcc_stat;
    case Feature::Pitch: return s.pitch;
    }
    return 0.0;
}

unsigned FeatureQuantizer::quantize(const FeatureSummary& s, Feature f) const {
    const int i = static_cast<int>(f);
    return quantize_to_byte(value_of(s, f), lo[i], hi[i]);
}

PatternSet build_pattern_set(std::span<const FeatureSummary> tracks,
                             const std::map<std::string, BinaryPattern>& class_codes,
                             const FeatureQuantizer& quantizer,
                             const std::vector<Feature>& features) {
    std::set<std::string> seen_codes;
    for (const auto& [label, code] : class_codes)
        if (!seen_codes.insert(code.to_string()).second)
            throw Error(Err::DuplicateClassCode, "class code " + code.to_string() + " reused");

    PatternSet set;
    set.entries.reserve(tracks.size());
    for (const auto& t : tracks) {
        auto it = class_codes.find(t.label);
        if (it == class_codes.end())
            throw Error(Err::UnknownLabel, "no class code for label " + t.label);

        PatternEntry e;
        e.label = t.label;
        e.input.reserve(features.size() * 8);
        for (Feature f : features) {
            const auto bipolar = to_binary_pattern(quantizer.quantize(t, f)).bipolar();
            e.input.insert(e.input.end(), bipolar.begin(), bipolar.end());
        }
        e.target = it->second.bipolar();
        set.entries.push_back(std::move(e));
    }
    return set;
}

std::map<std::string, BinaryPattern> default_class_codes(std::span<const std::string> labels) {
    std::set<std::string> unique(labels.begin(), labels.end());
    if (unique.size() > 255)
        throw Error(Err::OutOfRange, "more than 255 labels cannot be byte-coded");
    std::map<std::string, BinaryPattern> codes;
    unsigned next = 1;
    for (const auto& label : unique)
        codes.emplace(label, to_binary_pattern(next++));
    return codes;
}

void write_features_csv(std::ostream& out, std::span<const FeatureSummary> tracks) {
    out << "track_id,label,beat,fft_stat,mfcc_stat,pitch,zcr_mean\n";
    for (const auto& t : tracks) {
        out << t.track_id << ',' << t.label << ',' << format_double(t.beat) << ','
            << format_double(t.fft_stat) << ',' << format_double(t.mfcc_stat) << ','
            << format_double(t.pitch) << ',' << format_double(t.zcr_mean) << '\n';
    }
}

std::vector<FeatureSummary> read_features_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw Error(Err::ParseError, "empty features file");
    if (line == "track_id,label,beat,fft_stat,mfcc_stat,pitch,zcr_mean\r")
        line.pop_back();
    if (line != "track_id,label,beat,fft_stat,mfcc_stat,pitch,zcr_mean")
        throw Error(Err::ParseError, "unexpected features CSV header: " + line);

    std::vector<FeatureSummary> tracks;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ','))
            cols.push_back(col);
        if (cols.size() != 7)
            throw Error(Err::ParseError,
                        "expected 7 columns on line " + std::to_string(line_no));
        FeatureSummary s;
        s.track_id = cols[0];
        s.label = cols[1];
        s.beat = parse_double(cols[2], "beat");
        s.fft_stat = parse_double(cols[3], "fft_stat");
        s.mfcc_stat = parse_double(cols[4], "mfcc_stat");
        s.pitch = parse_double(cols[5], "pitch");
        s.zcr_mean = parse_double(cols[6], "zcr_mean");
        tracks.push_back(std::move(s));
    }
    return tracks;
}

void write_patterns_json(std::ostream& out, const PatternSet& set) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : set.entries) {
        arr.push_back({{"input", BinaryPattern::from_bipolar(e.input).to_string()},
                       {"target", BinaryPattern::from_bipolar(e.target).to_string()},
                       {"label", e.label}});
    }
    out << arr.dump(2) << '\n';
}

PatternSet read_patterns_json(std::istream& in) {
    nlohmann::json arr;
    try {
        in >> arr;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(Err::ParseError, std::string("bad patterns JSON: ") + ex.what());
    }
    if (!arr.is_array())
        throw Error(Err::ParseError, "patterns file must be a JSON array");
    PatternSet set;
    for (const auto& item : arr) {
        PatternEntry e;
        e.input = BinaryPattern::from_string(item.at("input").get<std::string>()).bipolar();
        e.target = BinaryPattern::from_string(item.at("target").get<std::string>()).bipolar();
        e.label = item.value("label", std::string{});
        set.entries.push_back(std::move(e));
    }
    return set;
}

} // namespace mfh
