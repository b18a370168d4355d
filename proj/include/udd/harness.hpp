#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "udd/channel.hpp"
#include "udd/context.hpp"
#include "udd/types.hpp"

namespace udd {

// Binary symmetric Markov chain: first bit uniform, each later bit flips
// its predecessor with probability switch_prob. Deterministic per seed.
SymbolSeq gen_markov_source(std::size_t n, double switch_prob, std::uint64_t seed);

// "bsc:<delta>" or a channel-file path. Returns the channel plus the
// crossover probability when the spec is a BSC (used for relative BER).
struct ChannelSpec {
    Channel channel;
    std::optional<double> bsc_delta;
};
ChannelSpec parse_channel_spec(const std::string& spec);

// One experiment grid. Datasets name clean data: "markov:<n>:<p>" for the
// synthetic source, or a .pbm / .uds path; the harness corrupts them through
// the channel with each record's seed. k values drive 1-D contexts for both
// denoisers; l values add 2-D patch contexts (ndude, image datasets only).
// Epoch checkpoints share one training run per (dataset, seed, context,
// arch): training to the largest value and snapshotting at each listed one
// is identical to training each separately, because updates are sequential.
struct SweepConfig {
    std::string channel_spec = "bsc:0.1";
    bool run_dude = true;
    bool run_ndude = true;
    std::vector<int> k_values;
    std::vector<int> l_values;
    PadRule boundary = PadRule::ZeroPad;
    std::vector<std::string> archs = {"40x4"};
    std::vector<int> epoch_checkpoints = {10};
    std::vector<std::uint64_t> seeds = {0};
    std::vector<std::string> datasets;
    int batch_size = 128;
    double learning_rate = 1e-3;
    bool prune = false;
    double bound_delta = 0.01;
};

// Line-oriented key=value text, lists comma-separated, '#' comments:
//   channel=bsc:0.1  algos=dude,ndude  k=1,2,4  boundary=zero_pad
//   arch=40x4,128x3  epochs=5,10,30  seeds=0,1,2  data=markov:100000:0.1
//   batch=128  lr=1e-3  prune=0  bound_delta=0.01
SweepConfig parse_sweep_text(const std::string& text);
SweepConfig parse_sweep_file(const std::string& path);

// One CSV row. config_id hashes the method knobs (algo, channel, boundary,
// context, arch, epochs, batch, lr, prune) but not seed or dataset, so
// means across replications group by it. Every row carries enough to be
// re-executed from the row alone. Wall time is kept in memory only; the
// serialized CSV is a pure function of config and seeds.
struct ExperimentRecord {
    std::string config_id;
    std::string algo;  // "dude" | "ndude"
    std::string dataset;
    std::string channel;
    std::string boundary;
    int k = 0;  // 1-D context radius; 0 for 2-D records
    int l = 0;  // 2-D patch side; 0 for 1-D records
    std::string arch;           // empty for dude
    int epochs = 0;             // checkpoint epoch; 0 for dude
    int batch_size = 0;         // 0 for dude
    double learning_rate = 0.0; // 0 for dude
    int prune = 0;
    std::uint64_t seed = 0;
    std::uint64_t n = 0;
    std::uint64_t n_eval = 0;
    double objective = 0.0;  // 0 for dude
    double est_loss = 0.0;
    std::optional<double> true_loss;
    std::optional<double> regret;
    std::optional<double> ber_rel;
    std::optional<double> b_hat;
    std::optional<double> c_max_val;
    std::optional<double> thm1;
    std::optional<double> thm2_star;
    std::optional<double> prop3;
    int bound_vacuous = 0;
    int bound_anomaly = 0;
    double bound_delta = 0.01;  // confidence level the bound columns used
    std::string status = "ok";
    std::string error;
    double wall_ms = 0.0;  // never serialized
};

// Runs every (dataset x seed x context x algo x arch) point, one record per
// epoch checkpoint for ndude. Failures become status="failed" rows and the
// sweep continues. Records come back sorted by (config_id, dataset, seed).
// n_threads > 1 distributes independent points across threads; the output
// is schedule-independent.
std::vector<ExperimentRecord> run_sweep(const SweepConfig& cfg, int n_threads = 1);

std::string records_to_csv(const std::vector<ExperimentRecord>& records);
void write_records_csv(const std::vector<ExperimentRecord>& records, const std::string& path);
std::vector<ExperimentRecord> read_records_csv(const std::string& path);

// Re-executes the experiment a row describes and returns the fresh record;
// est_loss/true_loss reproduce exactly for rows produced by run_sweep.
ExperimentRecord rerun_record(const ExperimentRecord& row);

// Validation-based model selection: the config minimizing mean true loss
// across its records, ties broken by lexicographically smallest config_id.
// Throws MissingTrueLoss if any successful record lacks true_loss and
// EmptyEvaluation when there are no usable records.
struct Selection {
    std::string config_id;
    double mean_true_loss = 0.0;
    ExperimentRecord representative;  // one of the winning rows
};
Selection select_hyperparams(const std::vector<ExperimentRecord>& records);

}  // namespace udd
