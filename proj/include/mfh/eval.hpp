#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mfh/encoding.hpp"
#include "mfh/error.hpp"
#include "mfh/hebbnet.hpp"

namespace mfh {

struct EvalRow {
    BinaryPattern input;
    BinaryPattern actual;
    BinaryPattern desired;
    long error_int = 0;       // decode(desired) - decode(actual)
    std::string error_binary; // signed minimal base-2 rendering of error_int
};

struct EvalReport {
    std::vector<EvalRow> rows;
    double lms = 0.0;
    double accuracy_overall = 0.0; // percent
    std::map<std::string, double> accuracy_per_class;
    std::vector<std::pair<int, double>> epoch_errors;
};

struct SignedError {
    long error_int = 0;
    std::string error_binary;
};

/// Stratified split: per label, floor(ratio * count) indices go to train,
/// the rest to test, order shuffled by the seeded generator.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_dataset(const std::vector<std::string>& labels, double ratio, std::uint64_t seed);

/// decode(desired) - decode(actual), rendered as minimal binary with a
/// leading '-' for negatives and "0" for equality.
SignedError signed_binary_error(const BinaryPattern& desired, const BinaryPattern& actual);

EvalRow make_eval_row(BinaryPattern input, BinaryPattern actual, BinaryPattern desired);

/// sqrt of the mean of (error_int / 2^width)^2 over the rows.
double lms_error(const std::vector<EvalRow>& rows);

/// Label of the class code nearest in Hamming distance; ties resolve to
/// the lowest code value.
std::string nearest_label(const BinaryPattern& predicted,
                          const std::map<std::string, BinaryPattern>& class_codes);

struct AccuracyReport {
    double overall = 0.0; // percent
    std::map<std::string, double> per_class;
};

AccuracyReport accuracy_report(const std::vector<std::pair<std::string, std::string>>& predictions);

struct CurveStats {
    double first_error = 0.0;
    double last_error = 0.0;
    bool non_increasing_after_first = false;
};

/// Writes "epoch,error" CSV rows with 6 decimal places and summarizes the
/// series shape.
CurveStats write_epoch_curve_csv(const EpochLog& log, std::ostream& out);

struct BenchSize {
    std::size_t n_inputs = 0;
    std::size_t n_outputs = 0;
};

struct BenchRow {
    std::size_t n_inputs = 0;
    std::size_t n_outputs = 0;
    double median_ns = 0.0;
    double ratio_vs_prev = 0.0; // 0 for the first row
};

/// Median wall time of a single forward pass per size, warm run,
/// single-threaded. Rows come back sorted by size.
std::vector<BenchRow> bench_forward(std::vector<BenchSize> sizes, int reps);

} // namespace mfh
