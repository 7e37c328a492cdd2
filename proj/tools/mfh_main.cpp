#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfh/commands.hpp"
#include "mfh/error.hpp"

namespace {

int exit_code_for(const mfh::Error& e) {
    return e.code() == mfh::Err::InvalidConfig ? 3 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"music feature extraction and single-layer pattern learning"};
    app.require_subcommand(1);

    mfh::ExtractOptions extract_opts;
    std::string extract_config;
    unsigned extract_workers = 0;
    auto* extract = app.add_subcommand("extract", "decode a dataset directory to a features CSV");
    extract->add_option("--dataset", extract_opts.dataset, "root with one subdirectory per label")
        ->required();
    extract->add_option("--out", extract_opts.out, "output CSV path")->required();
    extract->add_option("--config", extract_config, "config file (key = value)");
    auto* workers_opt =
        extract->add_option("--workers", extract_workers, "worker threads (0 = logical cores)");

    mfh::TrainOptions train_opts;
    std::string train_config, patterns_out;
    auto* train = app.add_subcommand("train", "encode, split and train a network");
    train->add_option("--features", train_opts.features, "features CSV")->required();
    train->add_option("--out", train_opts.out, "model JSON path")->required();
    train->add_option("--config", train_config, "config file (key = value)");
    train->add_option("--patterns", patterns_out, "also dump the encoded training patterns");

    mfh::EvalOptions eval_opts;
    auto* eval = app.add_subcommand("eval", "evaluate a model on the held-out split");
    eval->add_option("--model", eval_opts.model, "model JSON")->required();
    eval->add_option("--features", eval_opts.features, "features CSV")->required();
    eval->add_option("--out", eval_opts.out, "report JSON path")->required();

    auto* reproduce =
        app.add_subcommand("reproduce", "check the bundled reference calculations");

    mfh::BenchOptions bench_opts;
    auto* bench = app.add_subcommand("bench", "time the forward pass across sizes");
    bench->add_option("--sizes", bench_opts.input_sizes, "input sizes to measure");
    bench->add_option("--reps", bench_opts.reps, "timing repetitions per size");

    CLI11_PARSE(app, argc, argv);

    try {
        if (extract->parsed()) {
            if (!extract_config.empty())
                extract_opts.config = extract_config;
            if (workers_opt->count() > 0)
                extract_opts.workers = extract_workers;
            return mfh::cmd_extract(extract_opts, std::cout, std::cerr);
        }
        if (train->parsed()) {
            if (!train_config.empty())
                train_opts.config = train_config;
            if (!patterns_out.empty())
                train_opts.patterns_out = patterns_out;
            return mfh::cmd_train(train_opts, std::cout, std::cerr);
        }
        if (eval->parsed())
            return mfh::cmd_eval(eval_opts, std::cout, std::cerr);
        if (reproduce->parsed())
            return mfh::cmd_reproduce(std::cout, std::cerr);
        if (bench->parsed())
            return mfh::cmd_bench(bench_opts, std::cout, std::cerr);
    } catch (const mfh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
