#include "mfh/pipeline.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

namespace mfh {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos)
        return {};
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw Error(Err::InvalidConfig, "expected a boolean for " + key + ", got '" + v + "'");
}

double parse_num(const std::string& v, const std::string& key) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw Error(Err::InvalidConfig, "expected a number for " + key + ", got '" + v + "'");
    return out;
}

void apply_key(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "frame_len") cfg.frame_len = static_cast<std::size_t>(parse_num(value, key));
    else if (key == "hop") cfg.hop = static_cast<std::size_t>(parse_num(value, key));
    else if (key == "window") {
        if (value == "hamming") cfg.window = Window::Hamming;
        else if (value == "rectangular") cfg.window = Window::Rectangular;
        else throw Error(Err::InvalidConfig, "window must be hamming or rectangular");
    }
    else if (key == "n_mels") cfg.n_mels = static_cast<std::size_t>(parse_num(value, key));
    else if (key == "n_mfcc") cfg.n_mfcc = static_cast<std::size_t>(parse_num(value, key));
    else if (key == "f_min") cfg.f_min = parse_num(value, key);
    else if (key == "f_max") cfg.f_max = parse_num(value, key);
    else if (key == "quantize") {
        if (value == "byte") cfg.quantize_fixed_byte = true;
        else if (value == "minmax") cfg.quantize_fixed_byte = false;
        else throw Error(Err::InvalidConfig, "quantize must be byte or minmax");
    }
    else if (key == "learning_rate") cfg.train.learning_rate = parse_num(value, key);
    else if (key == "momentum") cfg.train.momentum = parse_num(value, key);
    else if (key == "momentum_enabled") cfg.train.momentum_enabled = parse_bool(value, key);
    else if (key == "max_epochs") cfg.train.max_epochs = static_cast<int>(parse_num(value, key));
    else if (key == "target_error") cfg.train.target_error = parse_num(value, key);
    else if (key == "normalize_weights") cfg.train.normalize_weights = parse_bool(value, key);
    else if (key == "unsupervised") cfg.train.unsupervised = parse_bool(value, key);
    else if (key == "bias_input") cfg.bias_input = parse_bool(value, key);
    else if (key == "split_ratio") cfg.split_ratio = parse_num(value, key);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_num(value, key));
    else if (key == "workers") cfg.workers = static_cast<unsigned>(parse_num(value, key));
    else if (key.starts_with("class_code.")) cfg.class_code_overrides[key.substr(11)] = value;
    else throw Error(Err::InvalidConfig, "unknown config key '" + key + "'");
}

} // namespace

void PipelineConfig::validate() const {
    if (frame_len == 0 || (frame_len & (frame_len - 1)) != 0)
        throw Error(Err::InvalidConfig, "frame_len must be a power of two");
    if (hop == 0 || hop > frame_len)
        throw Error(Err::InvalidConfig, "hop must satisfy 0 < hop <= frame_len");
    if (n_mels < 2)
        throw Error(Err::InvalidConfig, "n_mels must be at least 2");
    if (n_mfcc < 2 || n_mfcc > n_mels)
        throw Error(Err::InvalidConfig, "n_mfcc must lie in [2, n_mels]");
    if (!(split_ratio > 0.0 && split_ratio < 1.0))
        throw Error(Err::InvalidConfig, "split_ratio must lie in (0, 1)");
    train.validate();
}

PipelineConfig PipelineConfig::load(const std::filesystem::path* file) {
    PipelineConfig cfg;
    if (file != nullptr) {
        std::ifstream in(*file);
        if (!in)
            throw Error(Err::InvalidConfig, "cannot open config file " + file->string());
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.resize(hash);
            line = trim(line);
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw Error(Err::InvalidConfig,
                            "expected key = value on line " + std::to_string(line_no));
            apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }
    if (const char* env_seed = std::getenv("MFH_SEED")) {
        cfg.seed = static_cast<std::uint64_t>(parse_num(env_seed, "MFH_SEED"));
    }
    cfg.validate();
    return cfg;
}

FeatureSummary extract_track(const std::filesystem::path& wav, const std::string& track_id,
                             const std::string& label, const PipelineConfig& cfg) {
    const AudioBuffer buf = load_wav(wav);

    FrameSpec spectral_spec = cfg.frame_spec();
    FrameSpec raw_spec = spectral_spec;
    raw_spec.window = Window::Rectangular; // pitch and ZCR work on unwindowed slices

    const auto spectral_frames = frame_signal(buf, spectral_spec);
    const auto raw_frames = frame_signal(buf, raw_spec);

    const auto bank = build_mel_filterbank(cfg.n_mels, cfg.frame_len, buf.sample_rate,
                                           cfg.f_min, cfg.f_max_or_nyquist(buf.sample_rate));

    TrackFrameFeatures frames;
    frames.zcr.reserve(raw_frames.size());
    frames.mfcc.reserve(spectral_frames.size());
    frames.pitch.reserve(raw_frames.size());

    for (std::size_t i = 0; i < spectral_frames.size(); ++i) {
        frames.zcr.push_back(zero_crossing_rate(raw_frames[i]));

        const Spectrum spec = dft_magnitude(spectral_frames[i], buf.sample_rate);
        try {
            frames.centroid.push_back(spectral_centroid(spec));
        } catch (const Error& e) {
            if (e.code() != Err::SilentFrame)
                throw;
        }
        frames.mfcc.push_back(mfcc(spec, bank, cfg.n_mfcc));

        try {
            frames.pitch.push_back(estimate_pitch(raw_frames[i], buf.sample_rate));
        } catch (const Error& e) {
            if (e.code() != Err::FrameTooShort)
                throw;
            frames.pitch.push_back(std::nullopt);
        }
    }

    try {
        const TempoEstimate tempo = estimate_tempo(buf, spectral_spec);
        frames.tempo_bpm = tempo.bpm;
        frames.tempo_fallback = tempo.fallback;
    } catch (const Error& e) {
        if (e.code() != Err::SignalTooShort)
            throw;
        frames.tempo_bpm = 120.0; // too short to analyze; same default as a flat onset curve
        frames.tempo_fallback = true;
    }

    return summarize_track(track_id, label, frames);
}

} // namespace mfh
