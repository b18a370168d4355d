#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "udd/cli.hpp"
#include "udd/io.hpp"

using namespace udd;

namespace {

std::string tmp_path(const char* name) {
    return std::string("/tmp/udd_test_cli_") + name;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& p) : path(p) {}
    ~TempFile() { std::remove(path.c_str()); }
};

// Runs the CLI in-process with stdout captured.
struct CliResult {
    int exit_code = 0;
    std::string out;
};

CliResult run_cli(std::initializer_list<std::string> args) {
    std::vector<std::string> storage = {"udd"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(storage.size());
    for (const std::string& s : storage) argv.push_back(s.c_str());

    std::ostringstream captured;
    std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
    CliResult result;
    result.exit_code = cli_main(int(argv.size()), argv.data());
    std::cout.rdbuf(old);
    result.out = captured.str();
    return result;
}

// Extracts the value printed for `key` ("key value" lines).
std::string value_of(const std::string& out, const std::string& key) {
    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
    }
    return {};
}

}  // namespace

TEST_CASE("usage errors exit with 1 and help with 0") {
    CHECK(run_cli({}).exit_code == 1);
    CHECK(run_cli({"--help"}).exit_code == 0);
    CHECK(run_cli({"no-such-command"}).exit_code == 1);
    CHECK(run_cli({"dude"}).exit_code == 1);  // missing required options
}

TEST_CASE("runtime errors exit with 2") {
    CHECK(run_cli({"dude", "--bsc", "0.1", "--k", "1",
                   "--in", "/tmp/udd_test_cli_missing.uds"}).exit_code == 2);
    CHECK(run_cli({"bounds", "--bsc", "0.1", "--n", "10", "--k", "40",
                   "--arch", "4x1", "--B", "1"}).exit_code == 2);
}

TEST_CASE("gen, corrupt, denoise pipeline under a noiseless channel") {
    TempFile clean(tmp_path("clean.uds")), noisy(tmp_path("noisy.uds")),
        out(tmp_path("denoised.uds"));

    CHECK(run_cli({"gen-source", "--n", "4000", "--switch-prob", "0.1", "--seed", "1",
                   "--out", clean.path}).exit_code == 0);

    // A zero-crossover channel leaves the data untouched, and the denoiser
    // recognizes say-what-you-see as optimal: the output equals the input.
    CHECK(run_cli({"corrupt", "--bsc", "0", "--in", clean.path, "--seed", "1",
                   "--out", noisy.path}).exit_code == 0);
    CHECK(load_sequence(noisy.path).seq == load_sequence(clean.path).seq);

    const CliResult res = run_cli({"dude", "--bsc", "0", "--k", "1",
                                   "--in", noisy.path, "--clean", clean.path,
                                   "--out", out.path});
    CHECK(res.exit_code == 0);
    CHECK(load_sequence(out.path).seq == load_sequence(clean.path).seq);
    CHECK(value_of(res.out, "true_loss") == "0");
}

TEST_CASE("denoising a noisy sequence beats the raw channel error") {
    TempFile clean(tmp_path("c2.uds")), noisy(tmp_path("n2.uds"));

    REQUIRE(run_cli({"gen-source", "--n", "60000", "--switch-prob", "0.1", "--seed", "0",
                     "--out", clean.path}).exit_code == 0);
    REQUIRE(run_cli({"corrupt", "--bsc", "0.1", "--in", clean.path, "--seed", "0",
                     "--out", noisy.path}).exit_code == 0);

    const CliResult dude = run_cli({"dude", "--bsc", "0.1", "--k", "2",
                                    "--in", noisy.path, "--clean", clean.path});
    REQUIRE(dude.exit_code == 0);
    const double dude_rel = std::stod(value_of(dude.out, "ber_rel"));
    CHECK(dude_rel < 0.85);

    // The estimate tracks the truth on this much data.
    const double est = std::stod(value_of(dude.out, "est_loss"));
    const double truth = std::stod(value_of(dude.out, "true_loss"));
    CHECK(std::abs(est - truth) < 0.01);

    const CliResult nd = run_cli({"ndude", "--bsc", "0.1", "--k", "2",
                                  "--arch", "8x1", "--epochs", "2", "--batch", "256",
                                  "--seed", "0", "--in", noisy.path, "--clean", clean.path});
    REQUIRE(nd.exit_code == 0);
    CHECK(std::stod(value_of(nd.out, "ber_rel")) < 1.0);
    CHECK(value_of(nd.out, "b_hat") != "");
}

TEST_CASE("ndude requires exactly one context shape") {
    TempFile noisy(tmp_path("n3.uds"));
    REQUIRE(run_cli({"gen-source", "--n", "100", "--switch-prob", "0.1", "--seed", "0",
                     "--out", noisy.path}).exit_code == 0);

    CHECK(run_cli({"ndude", "--bsc", "0.1", "--in", noisy.path}).exit_code == 2);
    CHECK(run_cli({"ndude", "--bsc", "0.1", "--k", "1", "--l", "3",
                   "--in", noisy.path}).exit_code == 2);
}

TEST_CASE("model checkpoints reload for reuse") {
    TempFile clean(tmp_path("c4.uds")), noisy(tmp_path("n4.uds")),
        model(tmp_path("m4.udn")), trace(tmp_path("t4.csv"));

    REQUIRE(run_cli({"gen-source", "--n", "3000", "--switch-prob", "0.1", "--seed", "2",
                     "--out", clean.path}).exit_code == 0);
    REQUIRE(run_cli({"corrupt", "--bsc", "0.1", "--in", clean.path, "--seed", "2",
                     "--out", noisy.path}).exit_code == 0);

    const CliResult trained = run_cli({"ndude", "--bsc", "0.1", "--k", "1",
                                       "--arch", "8x1", "--epochs", "2", "--seed", "3",
                                       "--in", noisy.path, "--clean", clean.path,
                                       "--save-model", model.path, "--trace", trace.path});
    REQUIRE(trained.exit_code == 0);

    // Reloading skips training and reproduces the reported numbers.
    const CliResult reloaded = run_cli({"ndude", "--bsc", "0.1", "--k", "1",
                                        "--load-model", model.path,
                                        "--in", noisy.path, "--clean", clean.path});
    REQUIRE(reloaded.exit_code == 0);
    CHECK(value_of(reloaded.out, "est_loss") == value_of(trained.out, "est_loss"));
    CHECK(value_of(reloaded.out, "true_loss") == value_of(trained.out, "true_loss"));

    // The trace has a header plus one line per epoch and the initial state.
    std::ifstream tr(trace.path);
    REQUIRE(tr.good());
    std::string line;
    int lines = 0;
    while (std::getline(tr, line)) ++lines;
    CHECK(lines == 4);
}

TEST_CASE("bounds subcommand prints the frozen reference point") {
    const CliResult res = run_cli({"bounds", "--bsc", "0.1", "--n", "1000000", "--k", "1",
                                   "--arch", "4x1", "--B", "1", "--delta", "0.1"});
    REQUIRE(res.exit_code == 0);
    CHECK(value_of(res.out, "c_max") == "2.125");
    CHECK(value_of(res.out, "c_tilde") == "11.313708498984761");
    CHECK(value_of(res.out, "gamma") == "0.026591479484724945");
    CHECK(value_of(res.out, "thm1_rhs") == "7.264091191936365");
    CHECK(value_of(res.out, "thm2_rhs") == "3.632045595968182");
    CHECK(value_of(res.out, "prop3_epsilon") == "0.008953108343139728");
    CHECK(value_of(res.out, "thm1_vacuous") == "1");
    CHECK(value_of(res.out, "prop3_vacuous") == "0");
}

TEST_CASE("sweep and select run end to end") {
    TempFile config(tmp_path("sweep.cfg")), csv(tmp_path("sweep.csv"));
    std::ofstream(config.path) << "channel=bsc:0.1\n"
                                  "algos=dude\n"
                                  "k=1,2\n"
                                  "data=markov:4000:0.1\n"
                                  "seeds=0,1\n";

    CHECK(run_cli({"sweep", "--config", config.path, "--out", csv.path}).exit_code == 0);

    std::ifstream in(csv.path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("config_id,algo,dataset,", 0) == 0);
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) rows += !line.empty();
    CHECK(rows == 4);

    const CliResult sel = run_cli({"select", "--in", csv.path});
    CHECK(sel.exit_code == 0);
    CHECK(value_of(sel.out, "config_id") != "");
    CHECK(value_of(sel.out, "mean_true_loss") != "");
}

TEST_CASE("image pipeline stays an image") {
    TempFile clean(tmp_path("img.pbm")), noisy(tmp_path("img_noisy.pbm")),
        out(tmp_path("img_out.pbm"));

    SymbolGrid img;
    img.rows = 20;
    img.cols = 30;
    img.data.assign(600, 0);
    for (std::size_t r = 0; r < img.rows; ++r) {
        for (std::size_t c = 0; c < img.cols; ++c) {
            if ((r / 5 + c / 5) % 2 == 0) img.at(r, c) = 1;
        }
    }
    save_image_p1(img, clean.path);

    REQUIRE(run_cli({"corrupt", "--bsc", "0.1", "--in", clean.path, "--seed", "0",
                     "--out", noisy.path}).exit_code == 0);
    const SymbolGrid noisy_img = load_image(noisy.path);
    CHECK(noisy_img.rows == img.rows);
    CHECK(noisy_img.cols == img.cols);

    REQUIRE(run_cli({"dude", "--bsc", "0.1", "--k", "2", "--in", noisy.path,
                     "--clean", clean.path, "--out", out.path}).exit_code == 0);
    const SymbolGrid denoised = load_image(out.path);
    CHECK(denoised.rows == img.rows);
    CHECK(denoised.cols == img.cols);
}
