#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "mfh/dsp.hpp"
#include "support/oracles.hpp"

using namespace mfh;
namespace ts = testsupport;

namespace {

Err thrown_code(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return Err::InvalidArgument;
}

double full_spectrum_energy(const Spectrum& spec, std::size_t frame_len) {
    // Reassemble sum |X_k|^2 over the full transform from the one-sided
    // magnitudes of a real signal.
    double acc = spec.magnitudes.front() * spec.magnitudes.front();
    acc += spec.magnitudes.back() * spec.magnitudes.back();
    for (std::size_t k = 1; k + 1 < spec.magnitudes.size(); ++k)
        acc += 2.0 * spec.magnitudes[k] * spec.magnitudes[k];
    (void)frame_len;
    return acc;
}

} // namespace

// ---- zero crossing rate -------------------------------------------------

TEST_CASE("constant frames never cross zero") {
    const std::vector<double> frame = {0.3, 0.3, 0.3, 0.3};
    CHECK(zero_crossing_rate(frame) == 0.0);
}

TEST_CASE("alternating frames cross at every step") {
    const std::vector<double> frame = {1.0, -1.0, 1.0, -1.0};
    CHECK(zero_crossing_rate(frame) == 1.0);
}

TEST_CASE("sinusoid crossing rate approaches 2f/fs") {
    const auto tone = ts::sine(1000.0, 22050, 2048);

    // independent oracle: count sign boundaries directly
    std::size_t crossings = 0;
    for (std::size_t t = 1; t < tone.size(); ++t)
        if ((tone[t] >= 0.0) != (tone[t - 1] >= 0.0))
            ++crossings;
    const double expected = static_cast<double>(crossings) / (tone.size() - 1);

    CHECK(zero_crossing_rate(tone) == expected);
    CHECK(zero_crossing_rate(tone) == doctest::Approx(2.0 * 1000.0 / 22050.0).epsilon(0.06));
}

TEST_CASE("crossing rate ignores positive scaling and stays in [0, 1]") {
    for (std::uint32_t seed : {1u, 2u, 3u}) {
        const auto frame = ts::white_noise(seed, 512);
        const double r = zero_crossing_rate(frame);
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
        std::vector<double> scaled(frame);
        for (double& v : scaled)
            v *= 37.5;
        CHECK(zero_crossing_rate(scaled) == r);
    }
}

TEST_CASE("single-sample frames are rejected") {
    const std::vector<double> one = {0.5};
    CHECK(thrown_code([&] { zero_crossing_rate(one); }) == Err::FrameTooShort);
}

// ---- transform ------------------------------------------------------------

TEST_CASE("zero frames give zero magnitudes, impulses give flat ones") {
    const std::vector<double> zeros(64, 0.0);
    for (double m : dft_magnitude(zeros, 22050).magnitudes)
        CHECK(m == 0.0);

    std::vector<double> impulse(64, 0.0);
    impulse[0] = 1.0;
    for (double m : dft_magnitude(impulse, 22050).magnitudes)
        CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a cosine on bin k concentrates there") {
    const std::size_t n = 256;
    const std::size_t k = 19;
    std::vector<double> frame(n);
    for (std::size_t t = 0; t < n; ++t)
        frame[t] = std::cos(2.0 * std::numbers::pi * static_cast<double>(k * t) /
                            static_cast<double>(n));

    const Spectrum spec = dft_magnitude(frame, 22050);
    CHECK(spec.magnitudes[k] == doctest::Approx(n / 2.0).epsilon(1e-12));
    for (std::size_t j = 0; j < spec.magnitudes.size(); ++j)
        if (j != k)
            CHECK(std::fabs(spec.magnitudes[j]) < 1e-9);
}

TEST_CASE("transform matches the direct oracle and Parseval") {
    for (std::size_t n : {8u, 64u, 256u}) {
        for (std::uint32_t seed = 0; seed < 10; ++seed) {
            const auto frame = ts::white_noise(seed * 31 + static_cast<std::uint32_t>(n), n);
            const Spectrum spec = dft_magnitude(frame, 22050);
            const auto oracle = ts::naive_dft(frame);

            REQUIRE(spec.magnitudes.size() == n / 2 + 1);
            for (std::size_t k = 0; k < spec.magnitudes.size(); ++k)
                CHECK(std::fabs(spec.magnitudes[k] - std::abs(oracle[k])) <= 1e-9);

            double time_energy = 0.0;
            for (double x : frame)
                time_energy += x * x;
            const double freq_energy = full_spectrum_energy(spec, n) / static_cast<double>(n);
            CHECK(freq_energy == doctest::Approx(time_energy).epsilon(1e-9));
        }
    }
}

TEST_CASE("non power-of-two frames are rejected") {
    const std::vector<double> frame(100, 0.5);
    CHECK(thrown_code([&] { dft_magnitude(frame, 22050); }) == Err::NonPowerOfTwoLength);
}

// ---- spectral centroid ----------------------------------------------------

TEST_CASE("centroid of a single occupied bin is that bin's frequency") {
    Spectrum spec;
    spec.bin_hz = 10.0;
    spec.magnitudes.assign(101, 0.0);
    spec.magnitudes[40] = 2.5;
    CHECK(spectral_centroid(spec) == 400.0);
}

TEST_CASE("centroid of two equal bins is their midpoint") {
    Spectrum spec;
    spec.bin_hz = 10.0;
    spec.magnitudes.assign(101, 0.0);
    spec.magnitudes[20] = 1.0;
    spec.magnitudes[60] = 1.0;
    CHECK(spectral_centroid(spec) == 400.0);
}

TEST_CASE("centroid of a pure tone lands within one bin of its frequency") {
    // A Hann taper keeps spectral leakage from biasing the magnitude-weighted
    // mean; Hamming's flat sidelobe floor alone shifts it by ~13 bins.
    const auto tone = ts::sine(1000.0, 22050, 2048);
    std::vector<double> windowed(tone.size());
    for (std::size_t n = 0; n < tone.size(); ++n)
        windowed[n] = tone[n] * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n /
                                                      (tone.size() - 1)));

    const Spectrum spec = dft_magnitude(windowed, 22050);
    const double bin_width = 22050.0 / 2048.0;
    CHECK(std::fabs(spectral_centroid(spec) - 1000.0) <= bin_width);
}

TEST_CASE("centroid is scale invariant and bounded by Nyquist") {
    const auto frame = ts::white_noise(5, 1024);
    Spectrum spec = dft_magnitude(frame, 22050);
    const double c = spectral_centroid(spec);
    CHECK(c >= 0.0);
    CHECK(c <= 22050.0 / 2.0);

    for (double& m : spec.magnitudes)
        m *= 12.0;
    CHECK(spectral_centroid(spec) == doctest::Approx(c).epsilon(1e-12));
}

TEST_CASE("silent frames have no centroid") {
    Spectrum spec;
    spec.bin_hz = 10.0;
    spec.magnitudes.assign(65, 0.0);
    CHECK(thrown_code([&] { spectral_centroid(spec); }) == Err::SilentFrame);
}

// ---- mel filterbank ---------------------------------------------------------

TEST_CASE("mel scale fixed points") {
    CHECK(mel_from_hz(0.0) == 0.0);
    CHECK(mel_from_hz(700.0) == doctest::Approx(2595.0 * std::log10(2.0)).epsilon(1e-12));
    CHECK(hz_from_mel(mel_from_hz(1234.5)) == doctest::Approx(1234.5).epsilon(1e-12));
}

TEST_CASE("filterbank shape, positivity and coverage") {
    const auto bank = build_mel_filterbank(26, 2048, 22050, 0.0, 11025.0);
    CHECK(bank.n_filters == 26);
    CHECK(bank.n_bins == 1025);
    REQUIRE(bank.weights.size() == 26 * 1025);

    for (std::size_t i = 0; i < bank.n_filters; ++i) {
        double row_sum = 0.0;
        bool rising_done = false;
        double prev = 0.0;
        for (std::size_t k = 0; k < bank.n_bins; ++k) {
            const double w = bank.weight(i, k);
            CHECK(w >= 0.0);
            CHECK(w <= 1.0);
            row_sum += w;
            // unimodal: once the row starts falling it never rises again
            if (w < prev)
                rising_done = true;
            if (rising_done && w > prev)
                FAIL_CHECK("filter row " << i << " is not unimodal at bin " << k);
            prev = w;
        }
        CHECK(row_sum > 0.0);
    }

    // every bin between the first and last peak is covered
    std::size_t first_peak = 0, last_peak = 0;
    for (std::size_t k = 1; k < bank.n_bins; ++k) {
        if (bank.weight(0, k) > bank.weight(0, first_peak))
            first_peak = k;
        if (bank.weight(bank.n_filters - 1, k) > bank.weight(bank.n_filters - 1, last_peak))
            last_peak = k;
    }
    for (std::size_t k = first_peak; k <= last_peak; ++k) {
        double total = 0.0;
        for (std::size_t i = 0; i < bank.n_filters; ++i)
            total += bank.weight(i, k);
        CHECK(total > 0.0);
    }
}

TEST_CASE("invalid mel bands are rejected") {
    CHECK(thrown_code([&] { build_mel_filterbank(26, 2048, 22050, 500.0, 100.0); }) ==
          Err::InvalidBand);
    CHECK(thrown_code([&] { build_mel_filterbank(26, 2048, 22050, 0.0, 20000.0); }) ==
          Err::InvalidBand);
    CHECK(thrown_code([&] { build_mel_filterbank(1, 2048, 22050, 0.0, 11025.0); }) ==
          Err::InvalidBand);
}

// ---- mfcc ---------------------------------------------------------------

namespace {

// Test-side orthonormal DCT-II.
std::vector<double> dct_oracle(const std::vector<double>& x, std::size_t n_keep) {
    const std::size_t n = x.size();
    std::vector<double> out(n_keep);
    for (std::size_t k = 0; k < n_keep; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += x[i] * std::cos(std::numbers::pi * static_cast<double>(k) *
                                   (2.0 * static_cast<double>(i) + 1.0) /
                                   (2.0 * static_cast<double>(n)));
        out[k] = (k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n)) * acc;
    }
    return out;
}

// A bank whose filters pick out single bins, so mel energies are directly
// controllable from the spectrum.
MelFilterbank diagonal_bank(std::size_t n_filters, std::size_t n_bins) {
    MelFilterbank bank;
    bank.n_filters = n_filters;
    bank.n_bins = n_bins;
    bank.f_min = 0.0;
    bank.f_max = 0.0;
    bank.weights.assign(n_filters * n_bins, 0.0);
    for (std::size_t i = 0; i < n_filters; ++i)
        bank.weights[i * n_bins + i] = 1.0;
    return bank;
}

} // namespace

TEST_CASE("equal mel energies put everything on coefficient 0") {
    const std::size_t n_filters = 12;
    const auto bank = diagonal_bank(n_filters, 33);
    Spectrum spec;
    spec.bin_hz = 10.0;
    spec.magnitudes.assign(33, 2.5);

    const auto coeffs = mfcc(spec, bank, n_filters);
    CHECK(coeffs[0] ==
          doctest::Approx(std::sqrt(static_cast<double>(n_filters)) * std::log(2.5 + 1e-10)));
    for (std::size_t k = 1; k < coeffs.size(); ++k)
        CHECK(std::fabs(coeffs[k]) < 1e-12);
}

TEST_CASE("scaling the spectrum shifts only coefficient 0 by sqrt(n) log c") {
    const auto bank = build_mel_filterbank(26, 1024, 22050, 0.0, 11025.0);
    auto frame = ts::white_noise(17, 1024, 0.8);
    for (double& v : frame)
        v += 1.5; // keep energies far above the log floor
    Spectrum spec = dft_magnitude(frame, 22050);

    const auto base = mfcc(spec, bank, 13);
    const double c = 4.0;
    for (double& m : spec.magnitudes)
        m *= c;
    const auto scaled = mfcc(spec, bank, 13);

    CHECK(scaled[0] - base[0] == doctest::Approx(std::sqrt(26.0) * std::log(c)).epsilon(1e-9));
    for (std::size_t k = 1; k < base.size(); ++k)
        CHECK(scaled[k] == doctest::Approx(base[k]).epsilon(1e-9));
}

TEST_CASE("mfcc agrees with the direct DCT oracle") {
    const auto bank = build_mel_filterbank(20, 512, 22050, 0.0, 11025.0);
    const auto frame = ts::white_noise(23, 512);
    const Spectrum spec = dft_magnitude(frame, 22050);

    std::vector<double> log_energy(bank.n_filters);
    for (std::size_t i = 0; i < bank.n_filters; ++i) {
        double e = 0.0;
        for (std::size_t k = 0; k < bank.n_bins; ++k)
            e += bank.weight(i, k) * spec.magnitudes[k];
        log_energy[i] = std::log(e + 1e-10);
    }
    const auto expected = dct_oracle(log_energy, 13);

    const auto coeffs = mfcc(spec, bank, 13);
    REQUIRE(coeffs.size() == 13);
    for (std::size_t k = 0; k < 13; ++k)
        CHECK(coeffs[k] == doctest::Approx(expected[k]).epsilon(1e-12));
}

TEST_CASE("mapping mfcc over a track gives one coefficient row per frame") {
    AudioBuffer buf;
    buf.sample_rate = 22050;
    buf.samples = ts::white_noise(41, 22050);

    const FrameSpec spec{1024, 512, Window::Hamming};
    const auto frames = frame_signal(buf, spec);
    const auto bank = build_mel_filterbank(26, spec.frame_len, buf.sample_rate, 0.0, 11025.0);

    std::vector<std::vector<double>> matrix;
    for (const auto& frame : frames)
        matrix.push_back(mfcc(dft_magnitude(frame, buf.sample_rate), bank, 13));

    CHECK(matrix.size() == frames.size());
    for (const auto& row : matrix) {
        CHECK(row.size() == 13);
        for (double c : row)
            CHECK(std::isfinite(c));
    }

    // determinism
    const auto again = mfcc(dft_magnitude(frames[0], buf.sample_rate), bank, 13);
    CHECK(again == matrix[0]);
}

TEST_CASE("mfcc dimension checks") {
    const auto bank = build_mel_filterbank(26, 1024, 22050, 0.0, 11025.0);
    Spectrum wrong;
    wrong.bin_hz = 10.0;
    wrong.magnitudes.assign(100, 1.0);
    CHECK(thrown_code([&] { mfcc(wrong, bank, 13); }) == Err::DimensionMismatch);

    const auto frame = ts::white_noise(29, 1024);
    const Spectrum spec = dft_magnitude(frame, 22050);
    CHECK(thrown_code([&] { mfcc(spec, bank, 27); }) == Err::DimensionMismatch);
}

// ---- tempo ----------------------------------------------------------------

TEST_CASE("click train tempo estimates") {
    const FrameSpec spec{2048, 512, Window::Hamming};

    AudioBuffer buf;
    buf.sample_rate = 22050;

    SUBCASE("120 BPM") {
        buf.samples = ts::click_train(11025, 22050 * 12);
        const TempoEstimate t = estimate_tempo(buf, spec);
        CHECK(!t.fallback);
        CHECK(std::fabs(t.bpm - 120.0) <= 2.0);
    }
    SUBCASE("60 BPM") {
        buf.samples = ts::click_train(22050, 22050 * 12);
        const TempoEstimate t = estimate_tempo(buf, spec);
        CHECK(!t.fallback);
        CHECK(std::fabs(t.bpm - 60.0) <= 1.0);
    }
    SUBCASE("silence falls back to the flagged default") {
        buf.samples.assign(22050 * 6, 0.0);
        const TempoEstimate t = estimate_tempo(buf, spec);
        CHECK(t.fallback);
        CHECK(t.bpm == 120.0);
    }
    SUBCASE("amplitude scaling does not change the estimate") {
        buf.samples = ts::click_train(11025, 22050 * 8);
        const TempoEstimate a = estimate_tempo(buf, spec);
        for (double& v : buf.samples)
            v *= 0.3;
        const TempoEstimate b = estimate_tempo(buf, spec);
        CHECK(a.bpm == doctest::Approx(b.bpm).epsilon(1e-12));
    }
}

TEST_CASE("short buffers cannot carry a tempo") {
    AudioBuffer buf;
    buf.sample_rate = 22050;
    buf.samples.assign(22050 * 3, 0.1);
    const FrameSpec spec{2048, 512, Window::Hamming};
    CHECK(thrown_code([&] { estimate_tempo(buf, spec); }) == Err::SignalTooShort);
}

// ---- pitch ----------------------------------------------------------------

TEST_CASE("pitch of a 440 Hz sinusoid") {
    const auto tone = ts::sine(440.0, 22050, 2048);
    const auto pitch = estimate_pitch(tone, 22050);
    REQUIRE(pitch.has_value());
    CHECK(std::fabs(*pitch - 440.0) <= 10.0);
}

TEST_CASE("square wave of exact period 100 reads 220.5 Hz exactly") {
    const auto wave = ts::square_wave(100, 2048);
    const auto pitch = estimate_pitch(wave, 22050);
    REQUIRE(pitch.has_value());
    CHECK(*pitch == 220.5);
}

TEST_CASE("noise is unvoiced") {
    const auto noise = ts::white_noise(99, 2048);
    CHECK(!estimate_pitch(noise, 22050).has_value());
}

TEST_CASE("pitch ignores positive scaling") {
    auto tone = ts::sine(330.0, 22050, 2048, 0.9);
    const auto a = estimate_pitch(tone, 22050);
    for (double& v : tone)
        v *= 0.05;
    const auto b = estimate_pitch(tone, 22050);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(*a == *b);
}

TEST_CASE("frames must cover two periods of the lowest pitch") {
    const auto tone = ts::sine(440.0, 22050, 600);
    CHECK(thrown_code([&] { estimate_pitch(tone, 22050); }) == Err::FrameTooShort);
}
