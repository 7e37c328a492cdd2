#include "mfh/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>

namespace mfh {

namespace {

// Hand-rolled Fisher-Yates so split order is stable across standard
// libraries, not just across runs.
void shuffle_indices(std::vector<std::size_t>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng() % i]);
}

std::string unsigned_binary(unsigned long v) {
    if (v == 0)
        return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + (v & 1)));
        v >>= 1;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

} // namespace

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_dataset(const std::vector<std::string>& labels, double ratio, std::uint64_t seed) {
    if (labels.empty())
        throw Error(Err::EmptyManifest, "cannot split an empty manifest");
    if (!(ratio > 0.0 && ratio < 1.0))
        throw Error(Err::InvalidArgument, "split ratio must lie in (0, 1)");

    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < labels.size(); ++i)
        by_label[labels[i]].push_back(i);

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> train, test;
    for (auto& [label, idx] : by_label) {
        shuffle_indices(idx, rng);
        const auto n_train = static_cast<std::size_t>(
            std::floor(ratio * static_cast<double>(idx.size())));
        train.insert(train.end(), idx.begin(), idx.begin() + static_cast<long>(n_train));
        test.insert(test.end(), idx.begin() + static_cast<long>(n_train), idx.end());
    }
    return {std::move(train), std::move(test)};
}

SignedError signed_binary_error(const BinaryPattern& desired, const BinaryPattern& actual) {
    if (desired.width() != actual.width())
        throw Error(Err::WidthMismatch, "desired and actual patterns differ in width");
    const long e = static_cast<long>(desired.decode()) - static_cast<long>(actual.decode());
    std::string s = unsigned_binary(static_cast<unsigned long>(std::labs(e)));
    if (e < 0)
        s.insert(s.begin(), '-');
    return {e, std::move(s)};
}

EvalRow make_eval_row(BinaryPattern input, BinaryPattern actual, BinaryPattern desired) {
    auto err = signed_binary_error(desired, actual);
    return {std::move(input), std::move(actual), std::move(desired), err.error_int,
            std::move(err.error_binary)};
}

double lms_error(const std::vector<EvalRow>& rows) {
    if (rows.empty())
        throw Error(Err::EmptyRows, "no rows to aggregate");
    double acc = 0.0;
    for (const auto& r : rows) {
        const double norm = std::ldexp(1.0, static_cast<int>(r.desired.width())); // 2^width
        const double e = static_cast<double>(r.error_int) / norm;
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(rows.size()));
}

std::string nearest_label(const BinaryPattern& predicted,
                          const std::map<std::string, BinaryPattern>& class_codes) {
    if (class_codes.empty())
        throw Error(Err::EmptyPredictions, "no class codes to match against");
    const std::string* best_label = nullptr;
    std::size_t best_dist = 0;
    unsigned long best_value = 0;
    for (const auto& [label, code] : class_codes) {
        const std::size_t d = predicted.hamming(code);
        const unsigned long v = code.decode();
        if (best_label == nullptr || d < best_dist || (d == best_dist && v < best_value)) {
            best_label = &label;
            best_dist = d;
            best_value = v;
        }
    }
    return *best_label;
}

AccuracyReport accuracy_report(
    const std::vector<std::pair<std::string, std::string>>& predictions) {
    if (predictions.empty())
        throw Error(Err::EmptyPredictions, "no predictions to score");

    std::map<std::string, std::pair<std::size_t, std::size_t>> per_class; // correct, total
    std::size_t correct = 0;
    for (const auto& [predicted, truth] : predictions) {
        auto& [c, n] = per_class[truth];
        ++n;
        if (predicted == truth) {
            ++c;
            ++correct;
        }
    }

    AccuracyReport report;
    report.overall = 100.0 * static_cast<double>(correct) /
                     static_cast<double>(predictions.size());
    for (const auto& [label, counts] : per_class)
        report.per_class[label] =
            100.0 * static_cast<double>(counts.first) / static_cast<double>(counts.second);
    return report;
}

CurveStats write_epoch_curve_csv(const EpochLog& log, std::ostream& out) {
    if (log.entries.empty())
        throw Error(Err::EmptyLog, "epoch log is empty");

    out << "epoch,error\n";
    char buf[64];
    for (const auto& e : log.entries) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f\n", e.epoch, e.error);
        out << buf;
    }

    CurveStats stats;
    stats.first_error = log.entries.front().error;
    stats.last_error = log.entries.back().error;
    stats.non_increasing_after_first = true;
    for (std::size_t i = 1; i < log.entries.size(); ++i)
        if (log.entries[i].error > log.entries[i - 1].error)
            stats.non_increasing_after_first = false;
    return stats;
}

std::vector<BenchRow> bench_forward(std::vector<BenchSize> sizes, int reps) {
    if (reps < 10)
        throw Error(Err::InvalidArgument, "need at least 10 repetitions");
    for (const auto& s : sizes)
        if (s.n_inputs == 0 || s.n_outputs == 0)
            throw Error(Err::InvalidArgument, "benchmark sizes must be positive");

    std::sort(sizes.begin(), sizes.end(), [](const BenchSize& a, const BenchSize& b) {
        return a.n_inputs * a.n_outputs < b.n_inputs * b.n_outputs;
    });

    using clock = std::chrono::steady_clock;
    std::vector<BenchRow> rows;
    volatile double sink = 0.0; // keep the optimizer from dropping the pass

    for (const auto& size : sizes) {
        HebbNetwork net(size.n_inputs, size.n_outputs);
        for (std::size_t i = 0; i < net.weights().size(); ++i)
            net.weights()[i] = (i % 7) * 0.25 - 0.5;
        std::vector<double> x(size.n_inputs);
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = i % 2 == 0 ? 1.0 : -1.0;

        // Batch enough calls per sample that the clock resolution is noise.
        std::size_t iters = 1;
        for (;;) {
            const auto t0 = clock::now();
            for (std::size_t k = 0; k < iters; ++k)
                sink = sink + net.forward(x)[0];
            const auto dt = std::chrono::duration<double, std::nano>(clock::now() - t0).count();
            if (dt >= 20000.0 || iters >= (1u << 20))
                break;
            iters *= 2;
        }

        std::vector<double> samples(static_cast<std::size_t>(reps));
        for (auto& sample : samples) {
            const auto t0 = clock::now();
            for (std::size_t k = 0; k < iters; ++k)
                sink = sink + net.forward(x)[0];
            sample = std::chrono::duration<double, std::nano>(clock::now() - t0).count() /
                     static_cast<double>(iters);
        }
        std::sort(samples.begin(), samples.end());
        const double median = samples[samples.size() / 2];

        BenchRow row;
        row.n_inputs = size.n_inputs;
        row.n_outputs = size.n_outputs;
        row.median_ns = median;
        row.ratio_vs_prev = rows.empty() ? 0.0 : median / rows.back().median_ns;
        rows.push_back(row);
    }
    (void)sink;
    return rows;
}

} // namespace mfh
