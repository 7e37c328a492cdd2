#include "mfh/hebbnet.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "model_json.hpp"

namespace mfh {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0))
        throw Error(Err::InvalidConfig, "learning_rate must be positive");
    if (momentum < 0.0 || momentum >= 1.0)
        throw Error(Err::InvalidConfig, "momentum must lie in [0, 1)");
    if (max_epochs < 1)
        throw Error(Err::InvalidConfig, "max_epochs must be positive");
    if (target_error < 0.0)
        throw Error(Err::InvalidConfig, "target_error must be nonnegative");
}

int activate(double y_in) { return y_in > 0.0 ? 1 : -1; }

HebbNetwork::HebbNetwork(std::size_t n_inputs, std::size_t n_outputs, bool bias_input)
    : n_inputs_(n_inputs), n_outputs_(n_outputs), bias_input_(bias_input),
      weights_(n_inputs * n_outputs, 0.0) {
    if (n_inputs < 1 || n_outputs < 1)
        throw Error(Err::InvalidDimensions, "network needs at least one input and one output");
}

std::vector<double> HebbNetwork::resolve_input(std::span<const double> x) const {
    if (bias_input_ && x.size() == n_inputs_ - 1) {
        std::vector<double> with_bias;
        with_bias.reserve(n_inputs_);
        with_bias.push_back(1.0);
        with_bias.insert(with_bias.end(), x.begin(), x.end());
        return with_bias;
    }
    if (x.size() != n_inputs_)
        throw Error(Err::DimensionMismatch,
                    "input has " + std::to_string(x.size()) + " components, expected " +
                        std::to_string(n_inputs_));
    return {x.begin(), x.end()};
}

std::vector<double> HebbNetwork::forward(std::span<const double> x) const {
    const auto input = resolve_input(x);
    std::vector<double> y(n_outputs_, 0.0);
    for (std::size_t i = 0; i < n_inputs_; ++i) {
        const double xi = input[i];
        const double* row = weights_.data() + i * n_outputs_;
        for (std::size_t j = 0; j < n_outputs_; ++j)
            y[j] += xi * row[j];
    }
    return y;
}

std::vector<double> HebbNetwork::hebb_update(std::span<const double> x, std::span<const double> t,
                                             const TrainConfig& cfg,
                                             const std::vector<double>& prev_delta) {
    const auto input = resolve_input(x);
    if (t.size() != n_outputs_)
        throw Error(Err::DimensionMismatch, "target width does not match output count");
    if (!prev_delta.empty() && prev_delta.size() != weights_.size())
        throw Error(Err::DimensionMismatch, "previous delta does not match weight matrix");

    const double eta = cfg.learning_rate;
    const double mu = cfg.effective_momentum();

    std::vector<double> delta(weights_.size());
    for (std::size_t i = 0; i < n_inputs_; ++i)
        for (std::size_t j = 0; j < n_outputs_; ++j) {
            const std::size_t idx = i * n_outputs_ + j;
            double d = eta * input[i] * t[j];
            if (mu != 0.0 && !prev_delta.empty())
                d += mu * prev_delta[idx];
            delta[idx] = d;
            weights_[idx] += d;
        }
    return delta;
}

double HebbNetwork::mean_pattern_error(const PatternSet& patterns) const {
    double total = 0.0;
    for (const auto& e : patterns.entries) {
        const auto y = forward(e.input);
        std::size_t mismatches = 0;
        for (std::size_t j = 0; j < n_outputs_; ++j)
            mismatches += activate(y[j]) != (e.target[j] > 0.0 ? 1 : -1);
        total += static_cast<double>(mismatches) / static_cast<double>(n_outputs_);
    }
    return total / static_cast<double>(patterns.entries.size());
}

EpochLog HebbNetwork::train(const PatternSet& patterns, const TrainConfig& cfg) {
    cfg.validate();
    if (patterns.entries.empty())
        throw Error(Err::EmptyPatternSet, "nothing to train on");
    for (const auto& e : patterns.entries) {
        const bool ok_width = e.input.size() == n_inputs_ ||
                              (bias_input_ && e.input.size() == n_inputs_ - 1);
        if (!ok_width || e.target.size() != n_outputs_)
            throw Error(Err::DimensionMismatch, "pattern does not match network shape");
    }

    EpochLog log;
    std::vector<double> prev_delta;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        for (const auto& e : patterns.entries) {
            std::span<const double> target = e.target;
            std::vector<double> self_target;
            if (cfg.unsupervised) {
                const auto y = forward(e.input);
                self_target.resize(n_outputs_);
                for (std::size_t j = 0; j < n_outputs_; ++j)
                    self_target[j] = activate(y[j]);
                target = self_target;
            }
            prev_delta = hebb_update(e.input, target, cfg, prev_delta);
        }
        if (cfg.normalize_weights) {
            double max_abs = 0.0;
            for (double w : weights_)
                max_abs = std::max(max_abs, std::fabs(w));
            if (max_abs > 0.0)
                for (double& w : weights_)
                    w /= max_abs;
        }

        EpochEntry entry;
        entry.epoch = epoch;
        entry.error = mean_pattern_error(patterns);
        if (cfg.snapshot_weights)
            entry.weights = weights_;
        log.entries.push_back(std::move(entry));

        if (log.entries.back().error <= cfg.target_error)
            break;
    }
    return log;
}

BinaryPattern HebbNetwork::predict(std::span<const double> x) const {
    const auto y = forward(x);
    std::vector<std::uint8_t> bits(n_outputs_);
    for (std::size_t j = 0; j < n_outputs_; ++j)
        bits[j] = activate(y[j]) > 0 ? 1 : 0;
    return BinaryPattern(std::move(bits));
}

BinaryPattern HebbNetwork::predict(const BinaryPattern& input) const {
    const auto bipolar = input.bipolar();
    return predict(std::span<const double>(bipolar));
}

namespace detail {

nlohmann::json model_to_json(const HebbNetwork& net, const TrainConfig& cfg) {
    return nlohmann::json{
        {"n_inputs", net.n_inputs()},
        {"n_outputs", net.n_outputs()},
        {"bias_input", net.bias_input()},
        {"weights", net.weights()},
        {"config",
         {{"learning_rate", cfg.learning_rate},
          {"momentum", cfg.momentum},
          {"momentum_enabled", cfg.momentum_enabled},
          {"max_epochs", cfg.max_epochs},
          {"target_error", cfg.target_error},
          {"normalize_weights", cfg.normalize_weights},
          {"unsupervised", cfg.unsupervised}}},
    };
}

LoadedModel model_from_json(const nlohmann::json& j) {
    try {
        HebbNetwork net(j.at("n_inputs").get<std::size_t>(), j.at("n_outputs").get<std::size_t>(),
                        j.value("bias_input", false));
        auto weights = j.at("weights").get<std::vector<double>>();
        if (weights.size() != net.weights().size())
            throw Error(Err::ParseError, "weight array does not match declared dimensions");
        net.weights() = std::move(weights);

        TrainConfig cfg;
        if (j.contains("config")) {
            const auto& c = j.at("config");
            cfg.learning_rate = c.value("learning_rate", cfg.learning_rate);
            cfg.momentum = c.value("momentum", cfg.momentum);
            cfg.momentum_enabled = c.value("momentum_enabled", cfg.momentum_enabled);
            cfg.max_epochs = c.value("max_epochs", cfg.max_epochs);
            cfg.target_error = c.value("target_error", cfg.target_error);
            cfg.normalize_weights = c.value("normalize_weights", cfg.normalize_weights);
            cfg.unsupervised = c.value("unsupervised", cfg.unsupervised);
        }
        return {std::move(net), cfg};
    } catch (const nlohmann::json::exception& ex) {
        throw Error(Err::ParseError, std::string("bad model JSON: ") + ex.what());
    }
}

} // namespace detail

void save_model_json(std::ostream& out, const HebbNetwork& net, const TrainConfig& cfg) {
    out << detail::model_to_json(net, cfg).dump(2) << '\n';
}

LoadedModel load_model_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(Err::ParseError, std::string("bad model JSON: ") + ex.what());
    }
    return detail::model_from_json(j);
}

} // namespace mfh
