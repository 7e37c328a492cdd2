#include "mfh/audio_io.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

namespace mfh {

namespace {

struct Reader {
    const std::vector<unsigned char>& data;
    std::size_t pos = 0;

    bool eof() const { return pos >= data.size(); }
    std::size_t remaining() const { return data.size() - pos; }

    void need(std::size_t n, const char* what) {
        if (remaining() < n)
            throw Error(Err::CorruptHeader, std::string("truncated ") + what);
    }

    std::uint32_t u32() {
        need(4, "u32");
        std::uint32_t v = static_cast<std::uint32_t>(data[pos]) |
                          static_cast<std::uint32_t>(data[pos + 1]) << 8 |
                          static_cast<std::uint32_t>(data[pos + 2]) << 16 |
                          static_cast<std::uint32_t>(data[pos + 3]) << 24;
        pos += 4;
        return v;
    }

    std::uint16_t u16() {
        need(2, "u16");
        std::uint16_t v = static_cast<std::uint16_t>(data[pos] | data[pos + 1] << 8);
        pos += 2;
        return v;
    }

    std::array<char, 4> tag() {
        need(4, "chunk id");
        std::array<char, 4> t{};
        std::memcpy(t.data(), data.data() + pos, 4);
        pos += 4;
        return t;
    }
};

bool tag_is(const std::array<char, 4>& t, const char* s) {
    return std::memcmp(t.data(), s, 4) == 0;
}

struct FmtChunk {
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t block_align = 0;
    std::uint16_t bits = 0;
};

double decode_sample(const unsigned char* p, const FmtChunk& fmt) {
    switch (fmt.bits) {
    case 8:
        // 8-bit WAV is unsigned
        return (static_cast<int>(*p) - 128) / 128.0;
    case 16: {
        std::int16_t v;
        std::memcpy(&v, p, 2);
        return v / 32768.0;
    }
    case 24: {
        std::int32_t v = p[0] | p[1] << 8 | p[2] << 16;
        if (v & 0x800000)
            v |= ~0xFFFFFF; // sign extend
        return v / 8388608.0;
    }
    case 32: {
        float v;
        std::memcpy(&v, p, 4);
        double d = v;
        if (d > 1.0) d = 1.0;
        if (d < -1.0) d = -1.0;
        return d;
    }
    default:
        throw Error(Err::UnsupportedFormat, "unsupported bit depth");
    }
}

} // namespace

AudioBuffer load_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Err::NotFound, "cannot open " + path.string());

    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    Reader r{bytes};

    if (!tag_is(r.tag(), "RIFF"))
        throw Error(Err::CorruptHeader, "missing RIFF magic: " + path.string());
    r.u32(); // RIFF size; files in the wild get this wrong, rely on chunk sizes
    if (!tag_is(r.tag(), "WAVE"))
        throw Error(Err::CorruptHeader, "missing WAVE magic: " + path.string());

    FmtChunk fmt;
    bool have_fmt = false;
    const unsigned char* payload = nullptr;
    std::size_t payload_size = 0;

    while (!r.eof()) {
        if (r.remaining() < 8)
            throw Error(Err::CorruptHeader, "dangling bytes after last chunk");
        auto id = r.tag();
        std::uint32_t size = r.u32();
        if (size > r.remaining())
            throw Error(Err::CorruptHeader, "chunk size exceeds file size");

        if (tag_is(id, "fmt ")) {
            if (size < 16)
                throw Error(Err::CorruptHeader, "fmt chunk too small");
            Reader f{bytes};
            f.pos = r.pos;
            fmt.format = f.u16();
            fmt.channels = f.u16();
            fmt.sample_rate = f.u32();
            f.u32(); // byte rate
            fmt.block_align = f.u16();
            fmt.bits = f.u16();
            have_fmt = true;
        } else if (tag_is(id, "data")) {
            payload = bytes.data() + r.pos;
            payload_size = size;
        }
        r.pos += size + (size & 1); // chunks are word aligned
    }

    if (!have_fmt || payload == nullptr)
        throw Error(Err::CorruptHeader, "missing fmt or data chunk");

    if (fmt.format != 1 && fmt.format != 3)
        throw Error(Err::UnsupportedFormat,
                    "compression code " + std::to_string(fmt.format) + " not supported");
    if (fmt.channels < 1 || fmt.channels > 2)
        throw Error(Err::UnsupportedFormat,
                    std::to_string(fmt.channels) + " channels not supported");
    if (fmt.format == 1 && fmt.bits != 8 && fmt.bits != 16 && fmt.bits != 24)
        throw Error(Err::UnsupportedFormat, "PCM bit depth must be 8, 16 or 24");
    if (fmt.format == 3 && fmt.bits != 32)
        throw Error(Err::UnsupportedFormat, "float bit depth must be 32");
    if (fmt.sample_rate == 0)
        throw Error(Err::CorruptHeader, "zero sample rate");

    const std::size_t bytes_per_sample = fmt.bits / 8;
    const std::size_t expected_align = bytes_per_sample * fmt.channels;
    if (fmt.block_align != expected_align)
        throw Error(Err::CorruptHeader, "block alignment inconsistent with format");
    const std::size_t n_frames = payload_size / expected_align;

    AudioBuffer buf;
    buf.sample_rate = static_cast<int>(fmt.sample_rate);
    buf.samples.resize(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
        const unsigned char* p = payload + i * expected_align;
        double acc = 0.0;
        for (unsigned c = 0; c < fmt.channels; ++c)
            acc += decode_sample(p + c * bytes_per_sample, fmt);
        buf.samples[i] = acc / fmt.channels;
    }
    return buf;
}

double window_coefficient(Window w, std::size_t n, std::size_t n_total) {
    switch (w) {
    case Window::Rectangular:
        return 1.0;
    case Window::Hamming:
        if (n_total < 2)
            return 1.0;
        return 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                      static_cast<double>(n_total - 1));
    }
    return 1.0;
}

std::vector<std::vector<double>> frame_signal(const AudioBuffer& buf, const FrameSpec& spec) {
    if (spec.frame_len == 0 || (spec.frame_len & (spec.frame_len - 1)) != 0)
        throw Error(Err::InvalidArgument, "frame_len must be a power of two");
    if (spec.hop == 0 || spec.hop > spec.frame_len)
        throw Error(Err::InvalidArgument, "hop must satisfy 0 < hop <= frame_len");
    if (buf.samples.size() < spec.frame_len)
        throw Error(Err::SignalTooShort, "signal shorter than one frame");

    std::vector<double> win(spec.frame_len);
    for (std::size_t n = 0; n < spec.frame_len; ++n)
        win[n] = window_coefficient(spec.window, n, spec.frame_len);

    const std::size_t count = (buf.samples.size() - spec.frame_len) / spec.hop + 1;
    std::vector<std::vector<double>> frames;
    frames.reserve(count);
    for (std::size_t f = 0; f < count; ++f) {
        std::vector<double> frame(spec.frame_len);
        const double* src = buf.samples.data() + f * spec.hop;
        for (std::size_t n = 0; n < spec.frame_len; ++n)
            frame[n] = src[n] * win[n];
        frames.push_back(std::move(frame));
    }
    return frames;
}

} // namespace mfh
