#include "udd/ndude.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "udd/errors.hpp"
#include "udd/rng.hpp"

namespace udd {

namespace {

// Floor applied inside log() so a saturated softmax cannot produce an
// infinite objective. The gradient ignores the floor: below it the exact
// derivative through log is zero, while the standard softmax form keeps a
// restoring pull, which is the behavior wanted in training.
constexpr double kProbFloor = 1e-12;
constexpr int kEvalBatch = 4096;

std::vector<int> layer_dims(const Arch& arch) {
    std::vector<int> dims;
    dims.reserve(arch.hidden.size() + 2);
    dims.push_back(arch.input_dim);
    dims.insert(dims.end(), arch.hidden.begin(), arch.hidden.end());
    dims.push_back(arch.out_dim);
    return dims;
}

void check_arch(const Arch& arch, const char* where) {
    if (arch.input_dim < 1 || arch.out_dim < 1) {
        throw InvalidConfig(std::string(where) + ": input and output dimensions must be >= 1");
    }
    for (int width : arch.hidden) {
        if (width < 1) {
            throw InvalidConfig(std::string(where) + ": hidden widths must be >= 1, got " +
                                std::to_string(width));
        }
    }
}

void check_train_config(const TrainConfig& cfg) {
    if (cfg.epochs < 1) {
        throw InvalidConfig("train: epochs must be >= 1, got " + std::to_string(cfg.epochs));
    }
    if (cfg.batch_size < 1) {
        throw InvalidConfig("train: batch_size must be >= 1, got " +
                            std::to_string(cfg.batch_size));
    }
    if (!(cfg.learning_rate > 0.0)) {
        throw InvalidConfig("train: learning_rate must be positive, got " +
                            std::to_string(cfg.learning_rate));
    }
    if (cfg.project_b.has_value() && !(*cfg.project_b > 0.0)) {
        throw InvalidConfig("train: projection radius must be positive, got " +
                            std::to_string(*cfg.project_b));
    }
}

void check_input_cols(const NetParams& params, Eigen::Index cols, const char* where) {
    if (cols != params.arch.input_dim) {
        throw DimensionMismatch(std::string(where) + ": context dimension " +
                                std::to_string(cols) + " does not match network input " +
                                std::to_string(params.arch.input_dim));
    }
}

// Hidden forward pass. Returns the output-layer logits; when `acts` is
// non-null it receives the post-activation values A_0..A_L (A_0 = x).
Eigen::MatrixXd logits_batch(const NetParams& params, const Eigen::MatrixXd& x,
                             std::vector<Eigen::MatrixXd>* acts) {
    const std::size_t n_hidden = params.arch.hidden.size();
    Eigen::MatrixXd h = x;
    if (acts) {
        acts->clear();
        acts->push_back(h);
    }
    for (std::size_t l = 0; l < n_hidden; ++l) {
        h = ((h * params.w[l]).rowwise() + params.b[l].transpose()).cwiseMax(0.0);
        if (acts) acts->push_back(h);
    }
    return (h * params.w[n_hidden]).rowwise() + params.b[n_hidden].transpose();
}

// Row-wise softmax with max-logit subtraction for overflow safety.
void softmax_rows(Eigen::MatrixXd& logits) {
    const Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
    logits = (logits.colwise() - row_max).array().exp();
    const Eigen::VectorXd row_sum = logits.rowwise().sum();
    logits.array().colwise() /= row_sum.array();
}

// Smallest index attaining the row maximum (strict > keeps the first).
int argmax_row(const Eigen::MatrixXd& probs, Eigen::Index r) {
    int best = 0;
    double best_val = probs(r, 0);
    for (Eigen::Index s = 1; s < probs.cols(); ++s) {
        if (probs(r, s) > best_val) {
            best_val = probs(r, s);
            best = static_cast<int>(s);
        }
    }
    return best;
}

void check_tables(const NetParams& params, const ContextSource& src, const LossTables& tables,
                  const char* where) {
    if (tables.l_new.rows() != src.spec().z_size) {
        throw DimensionMismatch(std::string(where) + ": loss tables cover " +
                                std::to_string(tables.l_new.rows()) +
                                " noisy symbols but the context spec declares " +
                                std::to_string(src.spec().z_size));
    }
    if (tables.l_new.cols() != params.arch.out_dim) {
        throw DimensionMismatch(std::string(where) + ": loss tables cover " +
                                std::to_string(tables.l_new.cols()) +
                                " mappings but the network outputs " +
                                std::to_string(params.arch.out_dim));
    }
    check_input_cols(params, src.spec().encoded_dim(), where);
}

struct EvalResult {
    double objective = 0.0;
    double est_loss = 0.0;
};

// One pass over the evaluated positions: the mean pseudo-label
// cross-entropy and the mean estimated loss of the induced argmax denoiser.
EvalResult evaluate_pass(const NetParams& params, const ContextSource& src,
                         const LossTables& tables) {
    const std::size_t begin = src.eval_begin();
    const std::size_t end = src.eval_end();
    const std::size_t n_eval = end - begin;
    const int dim = src.spec().encoded_dim();

    Eigen::MatrixXd x;
    double obj_total = 0.0;
    double est_total = 0.0;
    for (std::size_t start = begin; start < end; start += kEvalBatch) {
        const std::size_t bsz = std::min<std::size_t>(kEvalBatch, end - start);
        x.resize(Eigen::Index(bsz), dim);
        for (std::size_t r = 0; r < bsz; ++r) {
            src.encode_into(start + r, x.row(Eigen::Index(r)));
        }
        Eigen::MatrixXd probs = logits_batch(params, x, nullptr);
        softmax_rows(probs);
        for (std::size_t r = 0; r < bsz; ++r) {
            const Symbol z = src.center(start + r);
            obj_total -= (tables.l_new.row(z).array() *
                          probs.row(Eigen::Index(r)).array().max(kProbFloor).log())
                             .sum();
            est_total += tables.l(z, argmax_row(probs, Eigen::Index(r)));
        }
    }
    return {obj_total / double(n_eval), est_total / double(n_eval)};
}

void project_node_norms(NetParams& params, double radius) {
    for (auto& w : params.w) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            const double norm = w.col(j).norm();
            if (norm > radius) {
                w.col(j) *= radius / norm;
            }
        }
    }
}

void put_u32(std::ostream& out, std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = char((v >> (8 * i)) & 0xFF);
    out.write(buf, 4);
}

void put_f64(std::ostream& out, double v) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = char((bits >> (8 * i)) & 0xFF);
    out.write(buf, 8);
}

class CheckpointReader {
public:
    explicit CheckpointReader(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw Error("load_checkpoint: cannot open " + path);
        }
        bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }

    std::uint32_t u32() {
        need(4, "truncated checkpoint (u32 field)");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(bytes_[off_ + i])) << (8 * i);
        off_ += 4;
        return v;
    }

    double f64() {
        need(8, "truncated checkpoint (f64 field)");
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= std::uint64_t(std::uint8_t(bytes_[off_ + i])) << (8 * i);
        off_ += 8;
        return std::bit_cast<double>(bits);
    }

    void expect_magic(const char* magic) {
        need(4, "truncated checkpoint (magic)");
        if (std::memcmp(bytes_.data() + off_, magic, 4) != 0) {
            throw ParseError("load_checkpoint: bad magic, not a network checkpoint", off_);
        }
        off_ += 4;
    }

    std::size_t offset() const { return off_; }
    std::size_t remaining() const { return bytes_.size() - off_; }

private:
    void need(std::size_t n, const char* what) {
        if (bytes_.size() - off_ < n) {
            throw ParseError(std::string("load_checkpoint: ") + what, off_);
        }
    }

    std::string bytes_;
    std::size_t off_ = 0;
};

}  // namespace

std::size_t Arch::weight_count() const {
    std::size_t count = 0;
    int prev = input_dim;
    for (int width : hidden) {
        count += std::size_t(prev) * std::size_t(width);
        prev = width;
    }
    count += std::size_t(prev) * std::size_t(out_dim);
    return count;
}

std::size_t Arch::param_count() const {
    std::size_t biases = std::size_t(out_dim);
    for (int width : hidden) biases += std::size_t(width);
    return weight_count() + biases;
}

std::vector<int> parse_arch_text(const std::string& text) {
    const auto sep = text.find_first_of("xX");
    if (sep == std::string::npos || sep == 0 || sep + 1 >= text.size()) {
        throw InvalidConfig("arch must be <width>x<depth>, e.g. 40x4, got \"" + text + "\"");
    }
    int width = 0;
    int depth = 0;
    try {
        std::size_t used = 0;
        width = std::stoi(text.substr(0, sep), &used);
        if (used != sep) throw std::invalid_argument("");
        depth = std::stoi(text.substr(sep + 1), &used);
        if (used != text.size() - sep - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw InvalidConfig("arch must be <width>x<depth>, e.g. 40x4, got \"" + text + "\"");
    }
    if (width < 1 || depth < 0) {
        throw InvalidConfig("arch width must be >= 1 and depth >= 0, got \"" + text + "\"");
    }
    return std::vector<int>(std::size_t(depth), width);
}

double NetParams::max_node_norm() const {
    double best = 0.0;
    for (const auto& layer : w) {
        best = std::max(best, layer.colwise().norm().maxCoeff());
    }
    return best;
}

NetParams init_params(const Arch& arch, std::uint64_t seed) {
    check_arch(arch, "init_params");
    NetParams params;
    params.arch = arch;
    const std::vector<int> dims = layer_dims(arch);
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const int fan_in = dims[l];
        const int fan_out = dims[l + 1];
        Eigen::MatrixXd w(fan_in, fan_out);
        const double bound = std::sqrt(3.0 / double(fan_in));
        for (int j = 0; j < fan_out; ++j) {
            for (int i = 0; i < fan_in; ++i) {
                w(i, j) = rng.next_symmetric(bound);
            }
        }
        params.w.push_back(std::move(w));
        params.b.emplace_back(Eigen::VectorXd::Zero(fan_out));
    }
    return params;
}

Eigen::VectorXd forward(const NetParams& params, const EncodedContext& ctx) {
    check_input_cols(params, ctx.vec.size(), "forward");
    Eigen::MatrixXd probs = logits_batch(params, ctx.vec.transpose(), nullptr);
    softmax_rows(probs);
    return probs.row(0).transpose();
}

Eigen::MatrixXd forward_batch(const NetParams& params, const Eigen::MatrixXd& x) {
    check_input_cols(params, x.cols(), "forward_batch");
    Eigen::MatrixXd probs = logits_batch(params, x, nullptr);
    softmax_rows(probs);
    return probs;
}

double objective(const NetParams& params, const ContextSource& src, const LossTables& tables) {
    check_tables(params, src, tables, "objective");
    return evaluate_pass(params, src, tables).objective;
}

double objective(const NetParams& params, const SymbolSeq& z_seq, const ContextSpec& spec,
                 const LossTables& tables) {
    return objective(params, ContextSource(z_seq, spec), tables);
}

GradTables gradient(const NetParams& params, const Eigen::MatrixXd& x, const Eigen::MatrixXd& g) {
    check_input_cols(params, x.cols(), "gradient");
    if (x.rows() == 0) {
        throw EmptyEvaluation("gradient: empty batch");
    }
    if (g.rows() != x.rows() || g.cols() != params.arch.out_dim) {
        throw DimensionMismatch("gradient: pseudo-label block is " + std::to_string(g.rows()) +
                                "x" + std::to_string(g.cols()) + ", expected " +
                                std::to_string(x.rows()) + "x" +
                                std::to_string(params.arch.out_dim));
    }

    std::vector<Eigen::MatrixXd> acts;
    Eigen::MatrixXd probs = logits_batch(params, x, &acts);
    softmax_rows(probs);

    const std::size_t n_layers = params.w.size();
    GradTables grads;
    grads.w.resize(n_layers);
    grads.b.resize(n_layers);
    const double scale = 1.0 / double(x.rows());

    // d(objective)/d(logits): (sum_s g_s) * p - g, per row.
    const Eigen::VectorXd g_sum = g.rowwise().sum();
    Eigen::MatrixXd delta = (probs.array().colwise() * g_sum.array()).matrix() - g;

    for (std::size_t l = n_layers; l-- > 0;) {
        grads.w[l] = acts[l].transpose() * delta * scale;
        grads.b[l] = delta.colwise().sum().transpose() * scale;
        if (l > 0) {
            delta = (delta * params.w[l].transpose())
                        .cwiseProduct((acts[l].array() > 0.0).cast<double>().matrix());
        }
    }
    return grads;
}

AdamState AdamState::zeros_like(const NetParams& params) {
    AdamState state;
    for (std::size_t l = 0; l < params.w.size(); ++l) {
        state.m_w.emplace_back(Eigen::MatrixXd::Zero(params.w[l].rows(), params.w[l].cols()));
        state.v_w.emplace_back(Eigen::MatrixXd::Zero(params.w[l].rows(), params.w[l].cols()));
        state.m_b.emplace_back(Eigen::VectorXd::Zero(params.b[l].size()));
        state.v_b.emplace_back(Eigen::VectorXd::Zero(params.b[l].size()));
    }
    return state;
}

void adam_step(NetParams& params, AdamState& state, const GradTables& grads,
               const TrainConfig& cfg) {
    if (grads.w.size() != params.w.size()) {
        throw DimensionMismatch("adam_step: gradient has " + std::to_string(grads.w.size()) +
                                " layers, parameters have " + std::to_string(params.w.size()));
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, double(state.t));
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, double(state.t));
    const double b1 = cfg.adam_beta1;
    const double b2 = cfg.adam_beta2;

    for (std::size_t l = 0; l < params.w.size(); ++l) {
        state.m_w[l] = b1 * state.m_w[l] + (1.0 - b1) * grads.w[l];
        state.v_w[l] = b2 * state.v_w[l] + (1.0 - b2) * grads.w[l].cwiseProduct(grads.w[l]);
        params.w[l].array() -= cfg.learning_rate * (state.m_w[l].array() / bc1) /
                               ((state.v_w[l].array() / bc2).sqrt() + cfg.adam_eps);

        state.m_b[l] = b1 * state.m_b[l] + (1.0 - b1) * grads.b[l];
        state.v_b[l] = b2 * state.v_b[l] + (1.0 - b2) * grads.b[l].cwiseProduct(grads.b[l]);
        params.b[l].array() -= cfg.learning_rate * (state.m_b[l].array() / bc1) /
                               ((state.v_b[l].array() / bc2).sqrt() + cfg.adam_eps);
    }
}

std::pair<NetParams, TrainTrace> train(const ContextSource& src, const MappingSet& s_set,
                                       const LossTables& tables, const Arch& arch,
                                       const TrainConfig& cfg, const EpochHook& hook) {
    check_arch(arch, "train");
    check_train_config(cfg);
    if (arch.out_dim != s_set.size()) {
        throw DimensionMismatch("train: network outputs " + std::to_string(arch.out_dim) +
                                " values but the mapping set has " + std::to_string(s_set.size()));
    }

    NetParams params = init_params(arch, derive_seed(cfg.seed, "init"));
    check_tables(params, src, tables, "train");
    AdamState state = AdamState::zeros_like(params);
    Rng shuffle_rng(derive_seed(cfg.seed, "shuffle"));

    const std::size_t begin = src.eval_begin();
    const std::size_t end = src.eval_end();
    const std::size_t n_eval = end - begin;
    std::vector<std::size_t> order(n_eval);
    std::iota(order.begin(), order.end(), begin);

    TrainTrace trace;
    {
        const EvalResult before = evaluate_pass(params, src, tables);
        trace.initial_objective = before.objective;
        trace.initial_est_loss = before.est_loss;
    }

    const int dim = arch.input_dim;
    Eigen::MatrixXd x;
    Eigen::MatrixXd g;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        if (cfg.shuffle) {
            shuffle_rng.shuffle(order);
        }
        for (std::size_t start = 0; start < n_eval; start += std::size_t(cfg.batch_size)) {
            const std::size_t bsz = std::min<std::size_t>(cfg.batch_size, n_eval - start);
            x.resize(Eigen::Index(bsz), dim);
            g.resize(Eigen::Index(bsz), arch.out_dim);
            for (std::size_t r = 0; r < bsz; ++r) {
                const std::size_t pos = order[start + r];
                src.encode_into(pos, x.row(Eigen::Index(r)));
                g.row(Eigen::Index(r)) = tables.l_new.row(src.center(pos));
            }
            adam_step(params, state, gradient(params, x, g), cfg);
            if (cfg.project_b.has_value()) {
                project_node_norms(params, *cfg.project_b);
            }
            trace.steps += 1;
        }
        const EvalResult eval = evaluate_pass(params, src, tables);
        const auto t1 = std::chrono::steady_clock::now();
        EpochStats stats;
        stats.epoch = epoch;
        stats.objective = eval.objective;
        stats.est_loss = eval.est_loss;
        stats.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        trace.epochs.push_back(stats);
        if (hook) {
            hook(epoch, params, stats);
        }
    }
    return {std::move(params), std::move(trace)};
}

std::pair<NetParams, TrainTrace> train(const SymbolSeq& z_seq, const ContextSpec& spec,
                                       const Channel& ch, const Arch& arch,
                                       const TrainConfig& cfg) {
    const MappingSet s_set = enumerate_mappings(ch.z_size, ch.xhat_size);
    const LossTables tables = estimated_loss(ch, s_set);
    return train(ContextSource(z_seq, spec), s_set, tables, arch, cfg);
}

std::vector<int> ndude_choices(const NetParams& params, const ContextSource& src) {
    check_input_cols(params, src.spec().encoded_dim(), "ndude_choices");
    const std::size_t begin = src.eval_begin();
    const std::size_t end = src.eval_end();
    std::vector<int> choices;
    choices.reserve(end - begin);

    Eigen::MatrixXd x;
    for (std::size_t start = begin; start < end; start += kEvalBatch) {
        const std::size_t bsz = std::min<std::size_t>(kEvalBatch, end - start);
        x.resize(Eigen::Index(bsz), src.spec().encoded_dim());
        for (std::size_t r = 0; r < bsz; ++r) {
            src.encode_into(start + r, x.row(Eigen::Index(r)));
        }
        Eigen::MatrixXd probs = logits_batch(params, x, nullptr);
        softmax_rows(probs);
        for (std::size_t r = 0; r < bsz; ++r) {
            choices.push_back(argmax_row(probs, Eigen::Index(r)));
        }
    }
    return choices;
}

SymbolSeq ndude_denoise(const NetParams& params, const ContextSource& src,
                        const MappingSet& s_set) {
    if (params.arch.out_dim != s_set.size()) {
        throw DimensionMismatch("ndude_denoise: network outputs " +
                                std::to_string(params.arch.out_dim) +
                                " values but the mapping set has " + std::to_string(s_set.size()));
    }
    const std::vector<int> choices = ndude_choices(params, src);
    SymbolSeq xhat = src.symbols();
    const std::size_t begin = src.eval_begin();
    for (std::size_t i = 0; i < choices.size(); ++i) {
        xhat[begin + i] = s_set.apply(choices[i], src.center(begin + i));
    }
    return xhat;
}

SymbolSeq ndude_denoise(const NetParams& params, const SymbolSeq& z_seq, const ContextSpec& spec,
                        const Channel& ch) {
    const MappingSet s_set = enumerate_mappings(ch.z_size, ch.xhat_size);
    return ndude_denoise(params, ContextSource(z_seq, spec), s_set);
}

void save_checkpoint(const NetParams& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("save_checkpoint: cannot open " + path);
    }
    out.write("UDN1", 4);
    put_u32(out, std::uint32_t(params.arch.input_dim));
    put_u32(out, std::uint32_t(params.arch.hidden.size()));
    for (int width : params.arch.hidden) {
        put_u32(out, std::uint32_t(width));
    }
    put_u32(out, std::uint32_t(params.arch.out_dim));
    for (std::size_t l = 0; l < params.w.size(); ++l) {
        const auto& w = params.w[l];
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                put_f64(out, w(i, j));
            }
        }
        for (Eigen::Index j = 0; j < params.b[l].size(); ++j) {
            put_f64(out, params.b[l](j));
        }
    }
    if (!out) {
        throw Error("save_checkpoint: write failed for " + path);
    }
}

NetParams load_checkpoint(const std::string& path) {
    CheckpointReader reader(path);
    reader.expect_magic("UDN1");

    constexpr std::uint32_t kMaxDim = 1u << 20;
    Arch arch;
    const std::uint32_t input_dim = reader.u32();
    const std::uint32_t n_hidden = reader.u32();
    if (input_dim == 0 || input_dim > kMaxDim || n_hidden > 1024) {
        throw ParseError("load_checkpoint: implausible header dimensions", reader.offset());
    }
    arch.input_dim = int(input_dim);
    for (std::uint32_t l = 0; l < n_hidden; ++l) {
        const std::uint32_t width = reader.u32();
        if (width == 0 || width > kMaxDim) {
            throw ParseError("load_checkpoint: implausible hidden width", reader.offset());
        }
        arch.hidden.push_back(int(width));
    }
    const std::uint32_t out_dim = reader.u32();
    if (out_dim == 0 || out_dim > kMaxDim) {
        throw ParseError("load_checkpoint: implausible output dimension", reader.offset());
    }
    arch.out_dim = int(out_dim);

    NetParams params;
    params.arch = arch;
    const std::vector<int> dims = layer_dims(arch);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Eigen::MatrixXd w(dims[l], dims[l + 1]);
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                const std::size_t off = reader.offset();
                w(i, j) = reader.f64();
                if (!std::isfinite(w(i, j))) {
                    throw ParseError("load_checkpoint: non-finite weight", off);
                }
            }
        }
        Eigen::VectorXd b(dims[l + 1]);
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            const std::size_t off = reader.offset();
            b(j) = reader.f64();
            if (!std::isfinite(b(j))) {
                throw ParseError("load_checkpoint: non-finite bias", off);
            }
        }
        params.w.push_back(std::move(w));
        params.b.push_back(std::move(b));
    }
    if (reader.remaining() != 0) {
        throw ParseError("load_checkpoint: trailing bytes after parameters", reader.offset());
    }
    return params;
}

}  // namespace udd
