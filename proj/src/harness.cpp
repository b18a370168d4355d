#include "udd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <span>
#include <sstream>
#include <thread>

#include "udd/bounds.hpp"
#include "udd/dude.hpp"
#include "udd/errors.hpp"
#include "udd/io.hpp"
#include "udd/mappings.hpp"
#include "udd/metrics.hpp"
#include "udd/ndude.hpp"
#include "udd/rng.hpp"

namespace udd {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace((unsigned char)s[b])) ++b;
    while (e > b && std::isspace((unsigned char)s[e - 1])) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= (unsigned char)c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[std::size_t(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

long long parse_int(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(trim(s), &used);
        if (used != trim(s).size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw InvalidConfig(std::string("expected an integer for ") + what + ", got \"" + s +
                            "\"");
    }
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(trim(s), &used);
        if (used != trim(s).size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw InvalidConfig(std::string("expected a non-negative integer for ") + what +
                            ", got \"" + s + "\"");
    }
}

double parse_real(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(trim(s), &used);
        if (used != trim(s).size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw InvalidConfig(std::string("expected a number for ") + what + ", got \"" + s + "\"");
    }
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Clean data named by a dataset spec. Markov sources draw from a
// seed-derived stream so each replication sees fresh data; files are fixed.
SymbolSeq load_clean_sequence(const std::string& spec, std::uint64_t seed) {
    if (spec.rfind("markov:", 0) == 0) {
        const auto parts = split(spec, ':');
        if (parts.size() != 3) {
            throw InvalidConfig("dataset spec must be markov:<n>:<p>, got \"" + spec + "\"");
        }
        const long long n = parse_int(parts[1], "markov n");
        if (n < 1) {
            throw InvalidConfig("markov length must be >= 1, got " + parts[1]);
        }
        const double p = parse_real(parts[2], "markov switch probability");
        return gen_markov_source(std::size_t(n), p, derive_seed(seed, "source"));
    }
    if (ends_with(spec, ".pbm")) {
        return grid_to_sequence(load_image(spec));
    }
    if (ends_with(spec, ".uds")) {
        return load_sequence(spec).seq;
    }
    throw InvalidConfig("dataset spec must be markov:<n>:<p>, a .pbm image, or a .uds sequence, "
                        "got \"" +
                        spec + "\"");
}

SymbolGrid load_clean_grid(const std::string& spec) {
    if (!ends_with(spec, ".pbm")) {
        throw InvalidConfig("2-D contexts need a .pbm image dataset, got \"" + spec + "\"");
    }
    return load_image(spec);
}

std::string make_config_id(const std::string& algo, const std::string& channel,
                           const std::string& boundary, int k, int l, const std::string& arch,
                           int epochs, int batch, double lr, int prune, double bound_delta) {
    std::string canon = "algo=" + algo + "|channel=" + channel + "|boundary=" + boundary +
                        "|k=" + std::to_string(k) + "|l=" + std::to_string(l) + "|arch=" + arch +
                        "|epochs=" + std::to_string(epochs) + "|batch=" + std::to_string(batch) +
                        "|lr=" + format_double(lr) + "|prune=" + std::to_string(prune) +
                        "|bound_delta=" + format_double(bound_delta);
    return hex16(fnv1a(canon));
}

// Mapping machinery for one channel, optionally dominance-pruned.
struct MappingKit {
    MappingSet set;
    LossTables tables;
    double lambda_cmax = 0.0;
};

MappingKit make_kit(const Channel& ch, bool prune) {
    MappingSet full = enumerate_mappings(ch.z_size, ch.xhat_size);
    LossTables tables = estimated_loss(ch, full);
    if (prune) {
        PrunedMappings pruned = prune_dominated(full, tables);
        return {std::move(pruned.set), std::move(pruned.tables),
                c_max(pruned.tables, ch.lambda)};
    }
    double cm = c_max(tables, ch.lambda);
    return {std::move(full), std::move(tables), cm};
}

// Shared skeleton for one sweep point's records.
ExperimentRecord base_record(const SweepConfig& cfg, const std::string& algo,
                             const std::string& dataset, std::uint64_t seed, int k, int l,
                             const std::string& arch, int epochs) {
    ExperimentRecord rec;
    rec.algo = algo;
    rec.dataset = dataset;
    rec.channel = cfg.channel_spec;
    rec.boundary = cfg.boundary == PadRule::ZeroPad ? "zero_pad" : "skip_boundary";
    rec.k = k;
    rec.l = l;
    rec.arch = arch;
    rec.epochs = epochs;
    rec.batch_size = algo == "ndude" ? cfg.batch_size : 0;
    rec.learning_rate = algo == "ndude" ? cfg.learning_rate : 0.0;
    rec.prune = cfg.prune ? 1 : 0;
    rec.seed = seed;
    rec.bound_delta = cfg.bound_delta;
    rec.config_id = make_config_id(algo, rec.channel, rec.boundary, k, l, arch, epochs,
                                   rec.batch_size, rec.learning_rate, rec.prune, cfg.bound_delta);
    return rec;
}

void fill_losses(ExperimentRecord& rec, const ChannelSpec& cs, std::span<const Symbol> x_eval,
                 std::span<const Symbol> xhat_eval, std::span<const Symbol> z_eval,
                 const std::vector<int>& choices, const LossTables& tables) {
    rec.est_loss = avg_estimated_loss(z_eval, choices, tables);
    rec.true_loss = avg_true_loss(x_eval, xhat_eval, cs.channel.lambda);
    rec.regret = rec.est_loss - *rec.true_loss;
    if (cs.bsc_delta.has_value() && *cs.bsc_delta > 0.0) {
        rec.ber_rel = relative_ber(*rec.true_loss, *cs.bsc_delta);
    }
}

void fill_dude_bounds(ExperimentRecord& rec, const SweepConfig& cfg, const MappingKit& kit,
                      const Channel& ch) {
    rec.c_max_val = kit.lambda_cmax;
    rec.prop3 = prop3_epsilon(rec.n, rec.k, cfg.bound_delta, ch.z_size, kit.set.size(),
                              kit.lambda_cmax);
    rec.bound_vacuous = is_vacuous(*rec.prop3, kit.lambda_cmax) ? 1 : 0;
    rec.bound_anomaly =
        (!rec.bound_vacuous && rec.regret && std::abs(*rec.regret) > *rec.prop3) ? 1 : 0;
}

void fill_ndude_bounds(ExperimentRecord& rec, const SweepConfig& cfg, const MappingKit& kit,
                       const Channel& ch, const NetParams& params, const ContextSpec& spec) {
    rec.b_hat = params.max_node_norm();
    rec.c_max_val = kit.lambda_cmax;
    // 2-D patches enter the bounds through the equivalent double-sided
    // radius: a window of w cells matches k = w/2.
    const int k_eff = spec.window_len() / 2;
    BoundInputs inp;
    inp.n = rec.n;
    inp.k = k_eff;
    inp.delta = cfg.bound_delta;
    inp.b_norm = *rec.b_hat;
    inp.hidden = params.arch.hidden;
    inp.s_size = kit.set.size();
    inp.z_size = ch.z_size;
    inp.c_max = kit.lambda_cmax;
    if (!params.arch.hidden.empty() && *rec.b_hat > 0.0) {
        rec.thm1 = thm1_rhs(inp);
        rec.thm2_star = thm2_rhs(inp);
    }
    rec.prop3 = prop3_epsilon(rec.n, k_eff, cfg.bound_delta, ch.z_size, kit.set.size(),
                              kit.lambda_cmax);
    const double reference = rec.thm2_star.value_or(*rec.prop3);
    rec.bound_vacuous = is_vacuous(reference, kit.lambda_cmax) ? 1 : 0;
    rec.bound_anomaly =
        (!rec.bound_vacuous && rec.regret && std::abs(*rec.regret) > reference) ? 1 : 0;
}

std::vector<ExperimentRecord> run_dude_point(const SweepConfig& cfg, const std::string& dataset,
                                             std::uint64_t seed, int k) {
    ExperimentRecord rec = base_record(cfg, "dude", dataset, seed, k, 0, "", 0);
    try {
        const ChannelSpec cs = parse_channel_spec(cfg.channel_spec);
        const SymbolSeq x = load_clean_sequence(dataset, seed);
        const SymbolSeq z = corrupt(x, cs.channel, derive_seed(seed, "noise"));
        const MappingKit kit = make_kit(cs.channel, cfg.prune);

        const std::vector<int> choices = dude_choices(z, k, cfg.boundary, kit.tables);
        const std::size_t begin = cfg.boundary == PadRule::SkipBoundary ? std::size_t(k) : 0;
        const std::size_t n_eval = choices.size();
        rec.n = z.size();
        rec.n_eval = n_eval;

        const SymbolSeq xhat = dude_denoise(z, k, cfg.boundary, kit.set, kit.tables);
        fill_losses(rec, cs, std::span(x).subspan(begin, n_eval),
                    std::span(xhat).subspan(begin, n_eval), std::span(z).subspan(begin, n_eval),
                    choices, kit.tables);
        fill_dude_bounds(rec, cfg, kit, cs.channel);
    } catch (const std::exception& e) {
        rec.status = "failed";
        rec.error = e.what();
    }
    return {rec};
}

std::vector<ExperimentRecord> run_ndude_point(const SweepConfig& cfg, const std::string& dataset,
                                              std::uint64_t seed, int k, int l,
                                              const std::string& arch_text) {
    std::vector<ExperimentRecord> records;
    for (int epoch : cfg.epoch_checkpoints) {
        records.push_back(base_record(cfg, "ndude", dataset, seed, k, l, arch_text, epoch));
    }
    try {
        const ChannelSpec cs = parse_channel_spec(cfg.channel_spec);
        const MappingKit kit = make_kit(cs.channel, cfg.prune);

        ContextSpec spec = l > 0 ? ContextSpec::two_d(l, cs.channel.z_size)
                                 : ContextSpec::one_d(k, cs.channel.z_size, cfg.boundary);
        SymbolSeq x;
        SymbolSeq z;
        std::optional<ContextSource> src;
        if (l > 0) {
            SymbolGrid clean = load_clean_grid(dataset);
            x = clean.data;
            z = corrupt(x, cs.channel, derive_seed(seed, "noise"));
            SymbolGrid noisy = clean;
            noisy.data = z;
            src.emplace(std::move(noisy), spec);
        } else {
            x = load_clean_sequence(dataset, seed);
            z = corrupt(x, cs.channel, derive_seed(seed, "noise"));
            src.emplace(z, spec);
        }

        Arch arch;
        arch.input_dim = spec.encoded_dim();
        arch.hidden = parse_arch_text(arch_text);
        arch.out_dim = kit.set.size();

        TrainConfig tc;
        tc.epochs = cfg.epoch_checkpoints.back();
        tc.batch_size = cfg.batch_size;
        tc.learning_rate = cfg.learning_rate;
        tc.seed = seed;

        const std::size_t begin = src->eval_begin();
        const std::size_t n_eval = src->eval_end() - begin;
        for (auto& rec : records) {
            rec.n = z.size();
            rec.n_eval = n_eval;
        }

        std::size_t next_checkpoint = 0;
        const EpochHook hook = [&](int epoch, const NetParams& params, const EpochStats& stats) {
            if (next_checkpoint >= records.size() ||
                cfg.epoch_checkpoints[next_checkpoint] != epoch) {
                return;
            }
            ExperimentRecord& rec = records[next_checkpoint];
            ++next_checkpoint;

            const std::vector<int> choices = ndude_choices(params, *src);
            SymbolSeq xhat = z;
            for (std::size_t i = 0; i < choices.size(); ++i) {
                xhat[begin + i] = kit.set.apply(choices[i], z[begin + i]);
            }
            rec.objective = stats.objective;
            fill_losses(rec, cs, std::span(x).subspan(begin, n_eval),
                        std::span(xhat).subspan(begin, n_eval),
                        std::span(z).subspan(begin, n_eval), choices, kit.tables);
            fill_ndude_bounds(rec, cfg, kit, cs.channel, params, spec);
            rec.wall_ms = stats.wall_ms;
        };

        train(*src, kit.set, kit.tables, arch, tc, hook);
    } catch (const std::exception& e) {
        for (auto& rec : records) {
            rec.status = "failed";
            rec.error = e.what();
        }
    }
    return records;
}

const char* kCsvHeader =
    "config_id,algo,dataset,channel,boundary,k,l,arch,epochs,batch,lr,prune,seed,n,n_eval,"
    "objective,est_loss,true_loss,regret,ber_rel,b_hat,c_max,thm1,thm2_star,prop3,"
    "bound_vacuous,bound_anomaly,bound_delta,status,error";
constexpr int kCsvColumns = 30;

std::string opt_cell(const std::optional<double>& v) {
    return v.has_value() ? format_double(*v) : "";
}

std::optional<double> parse_opt_cell(const std::string& cell, const char* what) {
    if (cell.empty()) return std::nullopt;
    return parse_real(cell, what);
}

// Commas and newlines in free-text cells would break the row structure.
std::string sanitize_cell(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return s;
}

std::string record_to_row(const ExperimentRecord& r) {
    std::string row;
    row += r.config_id;
    row += ',' + r.algo;
    row += ',' + sanitize_cell(r.dataset);
    row += ',' + sanitize_cell(r.channel);
    row += ',' + r.boundary;
    row += ',' + std::to_string(r.k);
    row += ',' + std::to_string(r.l);
    row += ',' + r.arch;
    row += ',' + std::to_string(r.epochs);
    row += ',' + std::to_string(r.batch_size);
    row += ',' + format_double(r.learning_rate);
    row += ',' + std::to_string(r.prune);
    row += ',' + std::to_string(r.seed);
    row += ',' + std::to_string(r.n);
    row += ',' + std::to_string(r.n_eval);
    row += ',' + format_double(r.objective);
    row += ',' + format_double(r.est_loss);
    row += ',' + opt_cell(r.true_loss);
    row += ',' + opt_cell(r.regret);
    row += ',' + opt_cell(r.ber_rel);
    row += ',' + opt_cell(r.b_hat);
    row += ',' + opt_cell(r.c_max_val);
    row += ',' + opt_cell(r.thm1);
    row += ',' + opt_cell(r.thm2_star);
    row += ',' + opt_cell(r.prop3);
    row += ',' + std::to_string(r.bound_vacuous);
    row += ',' + std::to_string(r.bound_anomaly);
    row += ',' + format_double(r.bound_delta);
    row += ',' + r.status;
    row += ',' + sanitize_cell(r.error);
    return row;
}

}  // namespace

SymbolSeq gen_markov_source(std::size_t n, double switch_prob, std::uint64_t seed) {
    if (!(switch_prob > 0.0 && switch_prob < 1.0)) {
        throw InvalidProbability("gen_markov_source: switch probability must lie in (0,1), got " +
                                 std::to_string(switch_prob));
    }
    SymbolSeq x(n);
    if (n == 0) return x;
    Rng rng(seed);
    x[0] = rng.next_bool() ? 1 : 0;
    for (std::size_t i = 1; i < n; ++i) {
        const bool flip = rng.next_double() < switch_prob;
        x[i] = flip ? Symbol(1 - x[i - 1]) : x[i - 1];
    }
    return x;
}

ChannelSpec parse_channel_spec(const std::string& spec) {
    if (spec.rfind("bsc:", 0) == 0) {
        const double delta = parse_real(spec.substr(4), "bsc crossover probability");
        return {bsc_channel(delta), delta};
    }
    return {load_channel_file(spec), std::nullopt};
}

SweepConfig parse_sweep_text(const std::string& text) {
    SweepConfig cfg;
    cfg.archs.clear();
    cfg.epoch_checkpoints.clear();
    cfg.seeds.clear();
    bool saw_algos = false;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidConfig("sweep config line " + std::to_string(line_no) +
                                ": expected key=value, got \"" + line + "\"");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        std::vector<std::string> items;
        for (const auto& piece : split(value, ',')) {
            const std::string item = trim(piece);
            if (!item.empty()) items.push_back(item);
        }
        if (items.empty()) {
            throw InvalidConfig("sweep config line " + std::to_string(line_no) + ": key \"" + key +
                                "\" has no value");
        }

        if (key == "channel") {
            cfg.channel_spec = value;
        } else if (key == "algos") {
            cfg.run_dude = false;
            cfg.run_ndude = false;
            saw_algos = true;
            for (const auto& item : items) {
                if (item == "dude") {
                    cfg.run_dude = true;
                } else if (item == "ndude") {
                    cfg.run_ndude = true;
                } else {
                    throw InvalidConfig("sweep config line " + std::to_string(line_no) +
                                        ": unknown algo \"" + item + "\"");
                }
            }
        } else if (key == "k") {
            for (const auto& item : items) {
                cfg.k_values.push_back(int(parse_int(item, "k")));
            }
        } else if (key == "l") {
            for (const auto& item : items) {
                cfg.l_values.push_back(int(parse_int(item, "l")));
            }
        } else if (key == "boundary") {
            if (value == "zero_pad") {
                cfg.boundary = PadRule::ZeroPad;
            } else if (value == "skip_boundary") {
                cfg.boundary = PadRule::SkipBoundary;
            } else {
                throw InvalidConfig("sweep config line " + std::to_string(line_no) +
                                    ": boundary must be zero_pad or skip_boundary");
            }
        } else if (key == "arch") {
            cfg.archs = items;
        } else if (key == "epochs") {
            for (const auto& item : items) {
                cfg.epoch_checkpoints.push_back(int(parse_int(item, "epochs")));
            }
        } else if (key == "seeds") {
            for (const auto& item : items) {
                cfg.seeds.push_back(parse_u64(item, "seed"));
            }
        } else if (key == "data") {
            for (const auto& item : items) {
                cfg.datasets.push_back(item);
            }
        } else if (key == "batch") {
            cfg.batch_size = int(parse_int(value, "batch"));
        } else if (key == "lr") {
            cfg.learning_rate = parse_real(value, "lr");
        } else if (key == "prune") {
            cfg.prune = parse_int(value, "prune") != 0;
        } else if (key == "bound_delta") {
            cfg.bound_delta = parse_real(value, "bound_delta");
        } else {
            throw InvalidConfig("sweep config line " + std::to_string(line_no) +
                                ": unknown key \"" + key + "\"");
        }
    }

    if (cfg.archs.empty()) cfg.archs = {"40x4"};
    if (cfg.epoch_checkpoints.empty()) cfg.epoch_checkpoints = {10};
    if (cfg.seeds.empty()) cfg.seeds = {0};
    if (!saw_algos) {
        cfg.run_dude = true;
        cfg.run_ndude = true;
    }

    if (cfg.datasets.empty()) {
        throw InvalidConfig("sweep config: at least one data entry is required");
    }
    if (cfg.k_values.empty() && cfg.l_values.empty()) {
        throw InvalidConfig("sweep config: at least one k or l value is required");
    }
    for (int k : cfg.k_values) {
        if (k < 1) throw InvalidConfig("sweep config: k values must be >= 1");
    }
    for (int l : cfg.l_values) {
        if (l < 3 || l % 2 == 0) {
            throw InvalidConfig("sweep config: l values must be odd and >= 3");
        }
    }
    std::sort(cfg.epoch_checkpoints.begin(), cfg.epoch_checkpoints.end());
    cfg.epoch_checkpoints.erase(
        std::unique(cfg.epoch_checkpoints.begin(), cfg.epoch_checkpoints.end()),
        cfg.epoch_checkpoints.end());
    for (int e : cfg.epoch_checkpoints) {
        if (e < 1) throw InvalidConfig("sweep config: epochs must be >= 1");
    }
    if (!(cfg.bound_delta > 0.0 && cfg.bound_delta < 1.0)) {
        throw InvalidConfig("sweep config: bound_delta must lie in (0,1)");
    }
    return cfg;
}

SweepConfig parse_sweep_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("parse_sweep_file: cannot open " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_sweep_text(buf.str());
}

std::vector<ExperimentRecord> run_sweep(const SweepConfig& cfg, int n_threads) {
    // Fail fast on a bad channel or config before queueing hours of work.
    parse_channel_spec(cfg.channel_spec);
    for (const auto& arch : cfg.archs) {
        parse_arch_text(arch);
    }

    std::vector<std::function<std::vector<ExperimentRecord>()>> jobs;
    for (const auto& dataset : cfg.datasets) {
        for (std::uint64_t seed : cfg.seeds) {
            if (cfg.run_dude) {
                for (int k : cfg.k_values) {
                    jobs.push_back([&cfg, dataset, seed, k] {
                        return run_dude_point(cfg, dataset, seed, k);
                    });
                }
            }
            if (cfg.run_ndude) {
                for (const auto& arch : cfg.archs) {
                    for (int k : cfg.k_values) {
                        jobs.push_back([&cfg, dataset, seed, k, arch] {
                            return run_ndude_point(cfg, dataset, seed, k, 0, arch);
                        });
                    }
                    for (int l : cfg.l_values) {
                        jobs.push_back([&cfg, dataset, seed, l, arch] {
                            return run_ndude_point(cfg, dataset, seed, 0, l, arch);
                        });
                    }
                }
            }
        }
    }

    std::vector<std::vector<ExperimentRecord>> results(jobs.size());
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            results[i] = jobs[i]();
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= jobs.size()) break;
                results[i] = jobs[i]();
            }
        };
        std::vector<std::thread> pool;
        const std::size_t width = std::min<std::size_t>(std::size_t(n_threads), jobs.size());
        pool.reserve(width);
        for (std::size_t t = 0; t < width; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    std::vector<ExperimentRecord> records;
    for (auto& chunk : results) {
        for (auto& rec : chunk) {
            records.push_back(std::move(rec));
        }
    }
    std::sort(records.begin(), records.end(),
              [](const ExperimentRecord& a, const ExperimentRecord& b) {
                  return std::tie(a.config_id, a.dataset, a.seed, a.epochs, a.k, a.l, a.arch) <
                         std::tie(b.config_id, b.dataset, b.seed, b.epochs, b.k, b.l, b.arch);
              });
    return records;
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& rec : records) {
        out += record_to_row(rec);
        out += '\n';
    }
    return out;
}

void write_records_csv(const std::vector<ExperimentRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    const std::string csv = records_to_csv(records);
    out.write(csv.data(), std::streamsize(csv.size()));
    if (!out) {
        throw Error("write_records_csv: cannot write " + path);
    }
}

std::vector<ExperimentRecord> read_records_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("read_records_csv: cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("read_records_csv: empty file", 0);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) {
        throw ParseError("read_records_csv: unexpected header", 0);
    }

    std::vector<ExperimentRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != kCsvColumns) {
            throw ParseError("read_records_csv: line " + std::to_string(line_no) + " has " +
                                 std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(kCsvColumns),
                             line_no);
        }
        ExperimentRecord r;
        int c = 0;
        r.config_id = cells[c++];
        r.algo = cells[c++];
        r.dataset = cells[c++];
        r.channel = cells[c++];
        r.boundary = cells[c++];
        r.k = int(parse_int(cells[c++], "k"));
        r.l = int(parse_int(cells[c++], "l"));
        r.arch = cells[c++];
        r.epochs = int(parse_int(cells[c++], "epochs"));
        r.batch_size = int(parse_int(cells[c++], "batch"));
        r.learning_rate = parse_real(cells[c++], "lr");
        r.prune = int(parse_int(cells[c++], "prune"));
        r.seed = parse_u64(cells[c++], "seed");
        r.n = parse_u64(cells[c++], "n");
        r.n_eval = parse_u64(cells[c++], "n_eval");
        r.objective = parse_real(cells[c++], "objective");
        r.est_loss = parse_real(cells[c++], "est_loss");
        r.true_loss = parse_opt_cell(cells[c++], "true_loss");
        r.regret = parse_opt_cell(cells[c++], "regret");
        r.ber_rel = parse_opt_cell(cells[c++], "ber_rel");
        r.b_hat = parse_opt_cell(cells[c++], "b_hat");
        r.c_max_val = parse_opt_cell(cells[c++], "c_max");
        r.thm1 = parse_opt_cell(cells[c++], "thm1");
        r.thm2_star = parse_opt_cell(cells[c++], "thm2_star");
        r.prop3 = parse_opt_cell(cells[c++], "prop3");
        r.bound_vacuous = int(parse_int(cells[c++], "bound_vacuous"));
        r.bound_anomaly = int(parse_int(cells[c++], "bound_anomaly"));
        r.bound_delta = parse_real(cells[c++], "bound_delta");
        r.status = cells[c++];
        r.error = cells[c++];
        records.push_back(std::move(r));
    }
    return records;
}

ExperimentRecord rerun_record(const ExperimentRecord& row) {
    SweepConfig cfg;
    cfg.channel_spec = row.channel;
    if (row.boundary == "zero_pad") {
        cfg.boundary = PadRule::ZeroPad;
    } else if (row.boundary == "skip_boundary") {
        cfg.boundary = PadRule::SkipBoundary;
    } else {
        throw InvalidConfig("rerun_record: unknown boundary \"" + row.boundary + "\"");
    }
    cfg.prune = row.prune != 0;
    cfg.bound_delta = row.bound_delta;
    cfg.datasets = {row.dataset};
    cfg.seeds = {row.seed};

    if (row.algo == "dude") {
        return run_dude_point(cfg, row.dataset, row.seed, row.k).front();
    }
    if (row.algo == "ndude") {
        cfg.batch_size = row.batch_size;
        cfg.learning_rate = row.learning_rate;
        cfg.epoch_checkpoints = {row.epochs};
        return run_ndude_point(cfg, row.dataset, row.seed, row.k, row.l, row.arch).front();
    }
    throw InvalidConfig("rerun_record: unknown algo \"" + row.algo + "\"");
}

Selection select_hyperparams(const std::vector<ExperimentRecord>& records) {
    std::map<std::string, std::pair<double, int>> groups;  // id -> (sum, count)
    std::map<std::string, const ExperimentRecord*> representatives;
    for (const auto& rec : records) {
        if (rec.status != "ok") continue;
        if (!rec.true_loss.has_value()) {
            throw MissingTrueLoss("select_hyperparams: record for config " + rec.config_id +
                                  " (dataset " + rec.dataset +
                                  ") has no true loss; selection needs clean validation data");
        }
        auto& bucket = groups[rec.config_id];
        bucket.first += *rec.true_loss;
        bucket.second += 1;
        representatives.emplace(rec.config_id, &rec);
    }
    if (groups.empty()) {
        throw EmptyEvaluation("select_hyperparams: no successful records to select from");
    }
    // std::map iterates in key order, so the first strict improvement wins
    // and ties keep the lexicographically smallest config_id.
    const std::string* best_id = nullptr;
    double best_mean = 0.0;
    for (const auto& [id, bucket] : groups) {
        const double mean = bucket.first / double(bucket.second);
        if (best_id == nullptr || mean < best_mean) {
            best_id = &id;
            best_mean = mean;
        }
    }
    Selection sel;
    sel.config_id = *best_id;
    sel.mean_true_loss = best_mean;
    sel.representative = *representatives.at(*best_id);
    return sel;
}

}  // namespace udd
