#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "udd/channel.hpp"
#include "udd/context.hpp"
#include "udd/mappings.hpp"
#include "udd/types.hpp"

namespace udd {

// Fully-connected ReLU network shape: input_dim one-hot context features,
// `hidden` ReLU layers, out_dim softmax outputs (one per mapping).
struct Arch {
    int input_dim = 0;
    std::vector<int> hidden;
    int out_dim = 0;

    int depth() const { return static_cast<int>(hidden.size()); }

    // Weight count, biases excluded:
    //   input_dim*n_1 + sum n_{l-1}*n_l + n_L*out_dim.
    std::size_t weight_count() const;
    // Weights plus one bias per non-input node.
    std::size_t param_count() const;
};

// "40x4" -> {40,40,40,40}; "64x3" -> {64,64,64}. Width then depth.
std::vector<int> parse_arch_text(const std::string& text);

// Network weights. Layer l holds a fan_in x fan_out table, so a node's
// incoming weights are one column; biases are separate per the usual
// convention (the weight-norm bound covers incoming weights only).
struct NetParams {
    Arch arch;
    std::vector<Eigen::MatrixXd> w;  // per layer, fan_in x fan_out
    std::vector<Eigen::VectorXd> b;  // per layer, fan_out

    // Largest per-node incoming-weight Euclidean norm across all layers:
    // the measured B-hat fed to the bound formulas.
    double max_node_norm() const;
};

struct TrainConfig {
    int epochs = 1;
    int batch_size = 128;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 0;
    bool shuffle = true;
    // When set, after every optimizer step each node's incoming-weight
    // vector is projected onto the ball of this radius.
    std::optional<double> project_b;
};

// Per-epoch record: the training objective and the average estimated loss
// of the denoiser the network induces at that point, both evaluated over
// the full data after the epoch's updates.
struct EpochStats {
    int epoch = 0;  // 1-based
    double objective = 0.0;
    double est_loss = 0.0;
    double wall_ms = 0.0;
};

struct TrainTrace {
    std::vector<EpochStats> epochs;  // exactly one entry per training epoch
    // Evaluation of the freshly initialized network, before any update, so
    // training progress can be judged against the starting point.
    double initial_objective = 0.0;
    double initial_est_loss = 0.0;
    std::int64_t steps = 0;  // optimizer steps taken
};

// Called after each epoch's evaluation; lets callers checkpoint or record
// per-epoch state without owning the training loop.
using EpochHook = std::function<void(int epoch, const NetParams&, const EpochStats&)>;

// Weights uniform on [-sqrt(3/fan_in), sqrt(3/fan_in)] (zero mean, variance
// 1/fan_in), biases zero. Deterministic per (arch, seed).
NetParams init_params(const Arch& arch, std::uint64_t seed);

// Softmax output for one encoded context. Throws DimensionMismatch.
Eigen::VectorXd forward(const NetParams& params, const EncodedContext& ctx);

// Batch version: rows of x are encoded contexts, rows of the result are
// probability vectors over the mapping set.
Eigen::MatrixXd forward_batch(const NetParams& params, const Eigen::MatrixXd& x);

// (1/n) sum_i C(g_i, p_i) where g_i is the pseudo-label row l_new(Z_i, .)
// and C(g,p) = -sum_s g_s log p_s, over the source's evaluated positions.
// log is floored at log(1e-12) so a saturated softmax keeps the value
// finite.
double objective(const NetParams& params, const ContextSource& src, const LossTables& tables);
double objective(const NetParams& params, const SymbolSeq& z_seq, const ContextSpec& spec,
                 const LossTables& tables);

// Gradients shaped like the parameters they differentiate.
struct GradTables {
    std::vector<Eigen::MatrixXd> w;
    std::vector<Eigen::VectorXd> b;
};

// Analytic gradient of the batch-mean objective at (x, g): rows of x are
// encoded contexts, rows of g the matching pseudo-label vectors.
GradTables gradient(const NetParams& params, const Eigen::MatrixXd& x, const Eigen::MatrixXd& g);

// Adam first/second moments plus the step counter for bias correction.
struct AdamState {
    std::vector<Eigen::MatrixXd> m_w, v_w;
    std::vector<Eigen::VectorXd> m_b, v_b;
    std::int64_t t = 0;

    static AdamState zeros_like(const NetParams& params);
};

// Standard Adam update with bias correction, in place.
void adam_step(NetParams& params, AdamState& state, const GradTables& grads,
               const TrainConfig& cfg);

// Mini-batch Adam training against the pseudo-labels derived from `tables`.
// The trace holds one entry per epoch plus a leading epoch-0 entry for the
// untrained network. Deterministic per (inputs, cfg.seed): the seed is split
// into an init stream and a shuffle stream.
std::pair<NetParams, TrainTrace> train(const ContextSource& src, const MappingSet& s_set,
                                       const LossTables& tables, const Arch& arch,
                                       const TrainConfig& cfg, const EpochHook& hook = {});
// Convenience over the full canonical mapping set of the channel.
std::pair<NetParams, TrainTrace> train(const SymbolSeq& z_seq, const ContextSpec& spec,
                                       const Channel& ch, const Arch& arch,
                                       const TrainConfig& cfg);

// Argmax mapping index per evaluated position (ties to the smallest index).
std::vector<int> ndude_choices(const NetParams& params, const ContextSource& src);

// xhat_i = s_m(Z_i) with m the argmax mapping at position i. Positions
// outside the evaluated range (1-D skip-boundary only) copy the input.
SymbolSeq ndude_denoise(const NetParams& params, const ContextSource& src,
                        const MappingSet& s_set);
SymbolSeq ndude_denoise(const NetParams& params, const SymbolSeq& z_seq, const ContextSpec& spec,
                        const Channel& ch);

// Flat binary checkpoint: magic "UDN1"; u32 little-endian input_dim, hidden
// count, each hidden width, out_dim; then per layer the weight table
// row-major followed by the bias vector, all IEEE f64 little-endian.
void save_checkpoint(const NetParams& params, const std::string& path);
NetParams load_checkpoint(const std::string& path);

}  // namespace udd
