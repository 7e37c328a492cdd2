#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace mfh {

// Command implementations behind the CLI. Each returns the process exit
// code: 0 success, 1 reproduction failure, 2 input error, 3 configuration
// error. Diagnostics go to `err`, data to files or `out`.

struct ExtractOptions {
    std::filesystem::path dataset;
    std::filesystem::path out;
    std::optional<std::filesystem::path> config;
    std::optional<unsigned> workers; // overrides the config value
};

struct TrainOptions {
    std::filesystem::path features;
    std::filesystem::path out; // model JSON; epochs.csv lands next to it
    std::optional<std::filesystem::path> config;
    std::optional<std::filesystem::path> patterns_out; // optional encoded-pattern dump
};

struct EvalOptions {
    std::filesystem::path model;
    std::filesystem::path features;
    std::filesystem::path out; // report JSON; the curve CSV lands next to it
};

struct BenchOptions {
    std::vector<std::size_t> input_sizes = {8, 64, 512};
    std::size_t n_outputs = 8;
    int reps = 51;
};

int cmd_extract(const ExtractOptions& opts, std::ostream& out, std::ostream& err);
int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_reproduce(std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err);

} // namespace mfh
