#include "udd/cli.hpp"

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "udd/bounds.hpp"
#include "udd/channel.hpp"
#include "udd/context.hpp"
#include "udd/dude.hpp"
#include "udd/errors.hpp"
#include "udd/harness.hpp"
#include "udd/io.hpp"
#include "udd/mappings.hpp"
#include "udd/metrics.hpp"
#include "udd/ndude.hpp"
#include "udd/rng.hpp"

namespace udd {

namespace {

struct ChannelOpts {
    double bsc = -1.0;
    std::string file;
};

void add_channel_opts(CLI::App* cmd, ChannelOpts& opts) {
    auto* bsc = cmd->add_option("--bsc", opts.bsc,
                                "binary symmetric channel with this crossover probability");
    auto* file = cmd->add_option("--channel", opts.file, "channel description file");
    bsc->excludes(file);
    file->excludes(bsc);
}

std::string channel_spec_of(const ChannelOpts& opts) {
    if (opts.bsc >= 0.0) {
        return "bsc:" + format_double(opts.bsc);
    }
    if (!opts.file.empty()) {
        return opts.file;
    }
    throw InvalidConfig("a channel is required: pass --bsc <delta> or --channel <file>");
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Symbol data plus enough shape to write results back in the same format.
struct LoadedData {
    SymbolSeq seq;
    bool is_image = false;
    std::size_t rows = 0;
    std::size_t cols = 0;
    int alphabet = 0;
};

LoadedData load_data(const std::string& path) {
    LoadedData data;
    if (ends_with(path, ".pbm")) {
        SymbolGrid img = load_image(path);
        data.is_image = true;
        data.rows = img.rows;
        data.cols = img.cols;
        data.seq = std::move(img.data);
        data.alphabet = 2;
        return data;
    }
    if (ends_with(path, ".uds")) {
        SequenceFile file = load_sequence(path);
        data.seq = std::move(file.seq);
        data.alphabet = file.alphabet;
        return data;
    }
    throw UnsupportedFormat("input must be a .pbm image or a .uds sequence, got " + path);
}

void save_data(const std::string& path, const SymbolSeq& seq, const LoadedData& shape,
               int alphabet) {
    if (ends_with(path, ".pbm")) {
        if (!shape.is_image) {
            throw UnsupportedFormat("cannot write " + path +
                                    ": output shape unknown because the input was not an image");
        }
        for (Symbol s : seq) {
            if (s > 1) {
                throw SymbolOutOfAlphabet("cannot write symbol " + std::to_string(int(s)) +
                                          " to a bitmap");
            }
        }
        save_image_p1(sequence_to_grid(seq, shape.rows, shape.cols), path);
        return;
    }
    if (ends_with(path, ".uds")) {
        save_sequence(seq, alphabet, path);
        return;
    }
    throw UnsupportedFormat("output must be a .pbm image or a .uds sequence, got " + path);
}

void print_kv(const std::string& key, const std::string& value) {
    std::cout << key << " " << value << "\n";
}

void print_kv(const std::string& key, double value) {
    print_kv(key, format_double(value));
}

// Everything below runs inside CLI11 callbacks; udd::Error escapes to
// cli_main, which maps it to exit code 2.

struct GenSourceOpts {
    std::uint64_t n = 0;
    double switch_prob = 0.1;
    std::uint64_t seed = 0;
    std::string out;
};

void run_gen_source(const GenSourceOpts& o) {
    // Derive a role-specific stream so `gen-source --seed S` and `corrupt --seed S`
    // never share RNG draws, and so CLI pipelines match sweep-generated datasets.
    const SymbolSeq x = gen_markov_source(o.n, o.switch_prob, derive_seed(o.seed, "source"));
    save_sequence(x, 2, o.out);
    print_kv("wrote", o.out);
    print_kv("n", std::to_string(x.size()));
}

struct CorruptOpts {
    ChannelOpts channel;
    std::string in, out;
    std::uint64_t seed = 0;
};

void run_corrupt(const CorruptOpts& o) {
    const ChannelSpec cs = parse_channel_spec(channel_spec_of(o.channel));
    const LoadedData data = load_data(o.in);
    const SymbolSeq z = corrupt(data.seq, cs.channel, derive_seed(o.seed, "noise"));
    save_data(o.out, z, data, cs.channel.z_size);
    print_kv("wrote", o.out);
    print_kv("n", std::to_string(z.size()));
}

PadRule boundary_of(const std::string& name) {
    return name == "skip_boundary" ? PadRule::SkipBoundary : PadRule::ZeroPad;
}

struct DudeOpts {
    ChannelOpts channel;
    std::string in, out, clean;
    int k = 1;
    std::string boundary = "zero_pad";
    bool prune = false;
};

void run_dude(const DudeOpts& o) {
    const ChannelSpec cs = parse_channel_spec(channel_spec_of(o.channel));
    const LoadedData data = load_data(o.in);
    const PadRule pad = boundary_of(o.boundary);

    MappingSet s_set = enumerate_mappings(cs.channel.z_size, cs.channel.xhat_size);
    LossTables tables = estimated_loss(cs.channel, s_set);
    if (o.prune) {
        PrunedMappings pruned = prune_dominated(s_set, tables);
        s_set = std::move(pruned.set);
        tables = std::move(pruned.tables);
    }

    const std::vector<int> choices = dude_choices(data.seq, o.k, pad, tables);
    const SymbolSeq xhat = dude_denoise(data.seq, o.k, pad, s_set, tables);
    const std::size_t begin = pad == PadRule::SkipBoundary ? std::size_t(o.k) : 0;
    const std::size_t n_eval = choices.size();

    const double est =
        avg_estimated_loss(std::span(data.seq).subspan(begin, n_eval), choices, tables);
    print_kv("algo", "dude");
    print_kv("k", std::to_string(o.k));
    print_kv("n", std::to_string(data.seq.size()));
    print_kv("n_eval", std::to_string(n_eval));
    print_kv("mappings", std::to_string(s_set.size()));
    print_kv("est_loss", est);
    if (!o.clean.empty()) {
        const LoadedData clean = load_data(o.clean);
        const double true_loss =
            avg_true_loss(std::span(clean.seq).subspan(begin, n_eval),
                          std::span(xhat).subspan(begin, n_eval), cs.channel.lambda);
        print_kv("true_loss", true_loss);
        print_kv("regret", est - true_loss);
        if (cs.bsc_delta.has_value() && *cs.bsc_delta > 0.0) {
            print_kv("ber_rel", relative_ber(true_loss, *cs.bsc_delta));
        }
    }
    if (!o.out.empty()) {
        save_data(o.out, xhat, data, cs.channel.xhat_size);
        print_kv("wrote", o.out);
    }
}

// "<width>x<depth>" for the uniform layouts the CLI builds; widths joined
// with '-' for anything else a checkpoint might carry.
std::string arch_text_of(const Arch& arch) {
    bool uniform = !arch.hidden.empty();
    for (int w : arch.hidden) uniform = uniform && w == arch.hidden.front();
    if (uniform) {
        return std::to_string(arch.hidden.front()) + "x" + std::to_string(arch.hidden.size());
    }
    std::string out;
    for (std::size_t i = 0; i < arch.hidden.size(); ++i) {
        out += (i ? "-" : "") + std::to_string(arch.hidden[i]);
    }
    return out;
}

struct NdudeOpts {
    ChannelOpts channel;
    std::string in, out, clean, trace, save_model, load_model;
    int k = 0;
    int l = 0;
    std::string arch = "40x4";
    int epochs = 10;
    int batch = 128;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    std::string boundary = "zero_pad";
    bool prune = false;
    double project_b = 0.0;
};

void run_ndude(const NdudeOpts& o) {
    if ((o.k > 0) == (o.l > 0)) {
        throw InvalidConfig("pass exactly one of --k (1-D context) or --l (2-D patch)");
    }
    const ChannelSpec cs = parse_channel_spec(channel_spec_of(o.channel));
    const LoadedData data = load_data(o.in);

    MappingSet s_set = enumerate_mappings(cs.channel.z_size, cs.channel.xhat_size);
    LossTables tables = estimated_loss(cs.channel, s_set);
    if (o.prune) {
        PrunedMappings pruned = prune_dominated(s_set, tables);
        s_set = std::move(pruned.set);
        tables = std::move(pruned.tables);
    }

    ContextSpec spec = o.l > 0 ? ContextSpec::two_d(o.l, cs.channel.z_size)
                               : ContextSpec::one_d(o.k, cs.channel.z_size,
                                                    boundary_of(o.boundary));
    std::optional<ContextSource> src;
    if (o.l > 0) {
        if (!data.is_image) {
            throw InvalidConfig("--l needs a .pbm image input");
        }
        SymbolGrid grid = sequence_to_grid(data.seq, data.rows, data.cols);
        src.emplace(std::move(grid), spec);
    } else {
        src.emplace(data.seq, spec);
    }

    NetParams params{};
    TrainTrace trace;
    bool trained = false;
    if (!o.load_model.empty()) {
        params = load_checkpoint(o.load_model);
        if (params.arch.input_dim != spec.encoded_dim() || params.arch.out_dim != s_set.size()) {
            throw DimensionMismatch("loaded model is " + std::to_string(params.arch.input_dim) +
                                    "->" + std::to_string(params.arch.out_dim) +
                                    " but this configuration needs " +
                                    std::to_string(spec.encoded_dim()) + "->" +
                                    std::to_string(s_set.size()));
        }
    } else {
        Arch arch;
        arch.input_dim = spec.encoded_dim();
        arch.hidden = parse_arch_text(o.arch);
        arch.out_dim = s_set.size();
        TrainConfig tc;
        tc.epochs = o.epochs;
        tc.batch_size = o.batch;
        tc.learning_rate = o.lr;
        tc.seed = o.seed;
        if (o.project_b > 0.0) {
            tc.project_b = o.project_b;
        }
        auto result = train(*src, s_set, tables, arch, tc);
        params = std::move(result.first);
        trace = std::move(result.second);
        trained = true;
    }

    const std::vector<int> choices = ndude_choices(params, *src);
    const std::size_t begin = src->eval_begin();
    const std::size_t n_eval = src->eval_end() - begin;
    SymbolSeq xhat = src->symbols();
    for (std::size_t i = 0; i < choices.size(); ++i) {
        xhat[begin + i] = s_set.apply(choices[i], xhat[begin + i]);
    }

    print_kv("algo", "ndude");
    if (o.l > 0) {
        print_kv("l", std::to_string(o.l));
    } else {
        print_kv("k", std::to_string(o.k));
    }
    print_kv("arch", arch_text_of(params.arch));
    print_kv("n", std::to_string(data.seq.size()));
    print_kv("n_eval", std::to_string(n_eval));
    print_kv("mappings", std::to_string(s_set.size()));
    if (trained) {
        print_kv("epochs", std::to_string(o.epochs));
        print_kv("objective", trace.epochs.back().objective);
    }
    print_kv("b_hat", params.max_node_norm());
    const double est =
        avg_estimated_loss(std::span(src->symbols()).subspan(begin, n_eval), choices, tables);
    print_kv("est_loss", est);
    if (!o.clean.empty()) {
        const LoadedData clean = load_data(o.clean);
        const double true_loss =
            avg_true_loss(std::span(clean.seq).subspan(begin, n_eval),
                          std::span(xhat).subspan(begin, n_eval), cs.channel.lambda);
        print_kv("true_loss", true_loss);
        print_kv("regret", est - true_loss);
        if (cs.bsc_delta.has_value() && *cs.bsc_delta > 0.0) {
            print_kv("ber_rel", relative_ber(true_loss, *cs.bsc_delta));
        }
    }
    if (!o.trace.empty() && trained) {
        std::string csv = "epoch,objective,est_loss\n";
        csv += "0," + format_double(trace.initial_objective) + "," +
               format_double(trace.initial_est_loss) + "\n";
        for (const auto& stats : trace.epochs) {
            csv += std::to_string(stats.epoch) + "," + format_double(stats.objective) + "," +
                   format_double(stats.est_loss) + "\n";
        }
        std::ofstream out(o.trace, std::ios::binary | std::ios::trunc);
        out.write(csv.data(), std::streamsize(csv.size()));
        if (!out) {
            throw Error("cannot write trace file " + o.trace);
        }
        print_kv("trace", o.trace);
    }
    if (!o.save_model.empty()) {
        save_checkpoint(params, o.save_model);
        print_kv("model", o.save_model);
    }
    if (!o.out.empty()) {
        save_data(o.out, xhat, data, cs.channel.xhat_size);
        print_kv("wrote", o.out);
    }
}

struct SweepOpts {
    std::string config;
    std::string out;
    int threads = 1;
};

void run_sweep_cmd(const SweepOpts& o) {
    const SweepConfig cfg = parse_sweep_file(o.config);
    const std::vector<ExperimentRecord> records = run_sweep(cfg, o.threads);
    write_records_csv(records, o.out);
    std::size_t failed = 0;
    for (const auto& rec : records) {
        if (rec.status != "ok") ++failed;
    }
    print_kv("records", std::to_string(records.size()));
    print_kv("failed", std::to_string(failed));
    print_kv("wrote", o.out);
}

struct SelectOpts {
    std::string in;
};

void run_select(const SelectOpts& o) {
    const Selection sel = select_hyperparams(read_records_csv(o.in));
    const ExperimentRecord& r = sel.representative;
    print_kv("config_id", sel.config_id);
    print_kv("mean_true_loss", sel.mean_true_loss);
    print_kv("algo", r.algo);
    if (r.l > 0) {
        print_kv("l", std::to_string(r.l));
    } else {
        print_kv("k", std::to_string(r.k));
    }
    if (r.algo == "ndude") {
        print_kv("arch", r.arch);
        print_kv("epochs", std::to_string(r.epochs));
        print_kv("batch", std::to_string(r.batch_size));
        print_kv("lr", r.learning_rate);
    }
    print_kv("boundary", r.boundary);
    print_kv("channel", r.channel);
    print_kv("prune", std::to_string(r.prune));
}

struct BoundsOpts {
    ChannelOpts channel;
    std::uint64_t n = 0;
    int k = 1;
    double delta = 0.1;
    std::string arch = "4x1";
    double b_norm = 1.0;
    double gamma = 0.0;
};

void run_bounds(const BoundsOpts& o) {
    const ChannelSpec cs = parse_channel_spec(channel_spec_of(o.channel));
    const MappingSet s_set = enumerate_mappings(cs.channel.z_size, cs.channel.xhat_size);
    const LossTables tables = estimated_loss(cs.channel, s_set);

    BoundInputs inp;
    inp.n = o.n;
    inp.k = o.k;
    inp.delta = o.delta;
    inp.b_norm = o.b_norm;
    inp.hidden = parse_arch_text(o.arch);
    inp.s_size = s_set.size();
    inp.z_size = cs.channel.z_size;
    inp.c_max = c_max(tables, cs.channel.lambda);
    if (o.gamma > 0.0) {
        inp.gamma = o.gamma;
    }

    const double t1 = thm1_rhs(inp);
    const double t2 = thm2_rhs(inp);
    const double p3 = prop3_epsilon(inp);
    print_kv("c_max", inp.c_max);
    print_kv("c_tilde", c_tilde(inp.b_norm, inp.hidden, inp.s_size));
    print_kv("gamma", inp.gamma.has_value() ? *inp.gamma : gamma_star(inp));
    print_kv("thm1_rhs", t1);
    print_kv("thm2_rhs", t2);
    print_kv("prop3_epsilon", p3);
    print_kv("thm1_vacuous", std::to_string(is_vacuous(t1, inp.c_max) ? 1 : 0));
    print_kv("thm2_vacuous", std::to_string(is_vacuous(t2, inp.c_max) ? 1 : 0));
    print_kv("prop3_vacuous", std::to_string(is_vacuous(p3, inp.c_max) ? 1 : 0));
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"universal discrete denoising under a known memoryless channel"};
    app.require_subcommand(1);

    GenSourceOpts gen;
    auto* gen_cmd = app.add_subcommand("gen-source", "generate a binary symmetric Markov source");
    gen_cmd->add_option("--n", gen.n, "sequence length")->required();
    gen_cmd->add_option("--switch-prob", gen.switch_prob, "bit flip probability (default 0.1)");
    gen_cmd->add_option("--seed", gen.seed, "random seed");
    gen_cmd->add_option("--out", gen.out, "output .uds file")->required();
    gen_cmd->callback([&] { run_gen_source(gen); });

    CorruptOpts cor;
    auto* cor_cmd = app.add_subcommand("corrupt", "pass clean data through the channel");
    add_channel_opts(cor_cmd, cor.channel);
    cor_cmd->add_option("--in", cor.in, "clean .pbm or .uds input")->required();
    cor_cmd->add_option("--out", cor.out, "noisy output path")->required();
    cor_cmd->add_option("--seed", cor.seed, "random seed");
    cor_cmd->callback([&] { run_corrupt(cor); });

    DudeOpts dud;
    auto* dude_cmd = app.add_subcommand("dude", "count-based sliding-window denoiser");
    add_channel_opts(dude_cmd, dud.channel);
    dude_cmd->add_option("--in", dud.in, "noisy .pbm or .uds input")->required();
    dude_cmd->add_option("--out", dud.out, "denoised output path");
    dude_cmd->add_option("--clean", dud.clean, "clean reference for true-loss reporting");
    dude_cmd->add_option("--k", dud.k, "context radius")->required();
    dude_cmd->add_option("--boundary", dud.boundary, "zero_pad (default) or skip_boundary")
        ->check(CLI::IsMember({"zero_pad", "skip_boundary"}));
    dude_cmd->add_flag("--prune-dominated", dud.prune, "drop dominated mappings");
    dude_cmd->callback([&] { run_dude(dud); });

    NdudeOpts ndu;
    auto* ndude_cmd = app.add_subcommand("ndude", "neural sliding-window denoiser");
    add_channel_opts(ndude_cmd, ndu.channel);
    ndude_cmd->add_option("--in", ndu.in, "noisy .pbm or .uds input")->required();
    ndude_cmd->add_option("--out", ndu.out, "denoised output path");
    ndude_cmd->add_option("--clean", ndu.clean, "clean reference for true-loss reporting");
    ndude_cmd->add_option("--k", ndu.k, "1-D context radius");
    ndude_cmd->add_option("--l", ndu.l, "2-D patch side (odd, images only)");
    ndude_cmd->add_option("--arch", ndu.arch, "hidden layers as <width>x<depth> (default 40x4)");
    ndude_cmd->add_option("--epochs", ndu.epochs, "training epochs (default 10)");
    ndude_cmd->add_option("--batch", ndu.batch, "mini-batch size (default 128)");
    ndude_cmd->add_option("--lr", ndu.lr, "Adam learning rate (default 1e-3)");
    ndude_cmd->add_option("--seed", ndu.seed, "random seed");
    ndude_cmd->add_option("--boundary", ndu.boundary, "zero_pad (default) or skip_boundary")
        ->check(CLI::IsMember({"zero_pad", "skip_boundary"}));
    ndude_cmd->add_flag("--prune-dominated", ndu.prune, "drop dominated mappings");
    ndude_cmd->add_option("--project-b", ndu.project_b,
                          "project node weight norms onto this radius after each step");
    ndude_cmd->add_option("--trace", ndu.trace, "write per-epoch objective/est_loss CSV here");
    ndude_cmd->add_option("--save-model", ndu.save_model, "write the trained checkpoint here");
    ndude_cmd->add_option("--load-model", ndu.load_model,
                          "load a checkpoint instead of training");
    ndude_cmd->callback([&] { run_ndude(ndu); });

    SweepOpts swp;
    auto* sweep_cmd = app.add_subcommand("sweep", "run an experiment grid to CSV");
    sweep_cmd->add_option("--config", swp.config, "sweep configuration file")->required();
    sweep_cmd->add_option("--out", swp.out, "output CSV path")->required();
    sweep_cmd->add_option("--threads", swp.threads, "worker threads (default 1)");
    sweep_cmd->callback([&] { run_sweep_cmd(swp); });

    SelectOpts sel;
    auto* select_cmd =
        app.add_subcommand("select", "pick the best configuration from a sweep CSV");
    select_cmd->add_option("--in", sel.in, "sweep CSV with true-loss columns")->required();
    select_cmd->callback([&] { run_select(sel); });

    BoundsOpts bnd;
    auto* bounds_cmd = app.add_subcommand("bounds", "evaluate the concentration-bound formulas");
    add_channel_opts(bounds_cmd, bnd.channel);
    bounds_cmd->add_option("--n", bnd.n, "sequence length")->required();
    bounds_cmd->add_option("--k", bnd.k, "context radius")->required();
    bounds_cmd->add_option("--delta", bnd.delta, "confidence level (default 0.1)");
    bounds_cmd->add_option("--arch", bnd.arch, "network class as <width>x<depth> (default 4x1)");
    bounds_cmd->add_option("--B", bnd.b_norm, "per-node weight-norm bound (default 1)");
    bounds_cmd->add_option("--gamma", bnd.gamma,
                           "free parameter of the second bound (default: optimized)");
    bounds_cmd->callback([&] { run_bounds(bnd); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace udd
