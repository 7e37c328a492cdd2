#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "mfh/encoding.hpp"
#include "mfh/error.hpp"

namespace mfh {

struct TrainConfig {
    double learning_rate = 0.2;
    double momentum = 0.7;
    bool momentum_enabled = true;
    int max_epochs = 10000;
    double target_error = 0.01;
    bool normalize_weights = false; // divide W by max |w| after each epoch
    bool unsupervised = false;      // replace the target with the net's own activation
    bool snapshot_weights = false;  // keep a weight copy per epoch in the log

    void validate() const;
    double effective_momentum() const { return momentum_enabled ? momentum : 0.0; }
};

struct EpochEntry {
    int epoch = 0; // 1-based
    double error = 0.0;
    std::vector<double> weights; // only filled when snapshots are on
};

struct EpochLog {
    std::vector<EpochEntry> entries;
};

/// +1 when the net input is positive, -1 otherwise.
int activate(double y_in);

/// Linear map from n_inputs to n_outputs units through one weight matrix,
/// trained with the additive Hebb rule. Weights start at zero.
class HebbNetwork {
public:
    HebbNetwork(std::size_t n_inputs, std::size_t n_outputs, bool bias_input = false);

    std::size_t n_inputs() const { return n_inputs_; }
    std::size_t n_outputs() const { return n_outputs_; }
    bool bias_input() const { return bias_input_; }

    double weight(std::size_t input, std::size_t output) const {
        return weights_[input * n_outputs_ + output];
    }
    const std::vector<double>& weights() const { return weights_; } // row-major
    std::vector<double>& weights() { return weights_; }

    /// Net input per output unit: y_j = sum_i x_i w_ij. No activation.
    /// With bias_input set, a vector one component short gets +1 prepended.
    std::vector<double> forward(std::span<const double> x) const;

    /// One Hebb step with momentum: dW = eta * outer(x, t) + mu * prev_delta.
    /// Returns the applied delta (row-major), which callers thread back in
    /// as prev_delta on the next step.
    std::vector<double> hebb_update(std::span<const double> x, std::span<const double> t,
                                    const TrainConfig& cfg,
                                    const std::vector<double>& prev_delta = {});

    /// Epoch-ordered training over the pattern set. After each epoch the
    /// mean pattern error (Hamming distance of activated outputs to the
    /// target, normalized by width) is logged; stops at max_epochs or once
    /// the error reaches target_error.
    EpochLog train(const PatternSet& patterns, const TrainConfig& cfg);

    BinaryPattern predict(std::span<const double> x) const;
    BinaryPattern predict(const BinaryPattern& input) const;

private:
    std::vector<double> resolve_input(std::span<const double> x) const;
    double mean_pattern_error(const PatternSet& patterns) const;

    std::size_t n_inputs_;
    std::size_t n_outputs_;
    bool bias_input_;
    std::vector<double> weights_;
};

void save_model_json(std::ostream& out, const HebbNetwork& net, const TrainConfig& cfg);
struct LoadedModel {
    HebbNetwork net;
    TrainConfig cfg;
};
LoadedModel load_model_json(std::istream& in);

} // namespace mfh
