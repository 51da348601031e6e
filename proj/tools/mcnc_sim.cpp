// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end for the link-level campaigns.
//
//   mcnc_sim <subcommand> --config <path> [--out <path>] [--seed <u64>] [--threads <n>]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "mcnc/harness/config.hpp"
#include "mcnc/harness/csv.hpp"
#include "mcnc/harness/sweep.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct Common {
    std::string config;
    std::string out = "-";
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "Scenario configuration file")->required();
    sub->add_option("--out", c.out, "Output CSV path ('-' for stdout)");
    sub->add_option("--seed", c.seed, "Master seed (overrides sweep.seed)");
    sub->add_option("--threads", c.threads, "Worker threads per scenario point")->check(CLI::PositiveNumber);
}

template <class Write>
int emit(const std::string& out, Write&& write) {
    if (out == "-") {
        write(std::cout);
        return 0;
    }
    std::ofstream f(out);
    if (!f) {
        std::cerr << "error: cannot open output file '" << out << "'\n";
        return exit_config;
    }
    write(f);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Massive-MIMO OFDM clipping-noise-cancellation link simulator"};
    app.require_subcommand(1);

    Common common;
    const char* sweeps[][2] = {
        {"ber-sweep", "BER vs Eb/N0 per receiver and iteration count"},
        {"sdr-sweep", "Signal-to-distortion ratio vs IBO, channel and K"},
        {"alpha-check", "Per-antenna IBO and Bussgang gain, empirical vs analytic"},
        {"berin-berout", "BER after I iterations against standard-receiver BER"},
        {"convergence", "BER against the number of iterations"},
        {"complexity", "Operation counts of the three receivers"},
    };
    for (const auto& s : sweeps)
        add_common(app.add_subcommand(s[0], s[1]), common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        mcnc::ScenarioConfig cfg = mcnc::load_config(common.config);
        if (common.seed)
            cfg.seed = *common.seed;
        const mcnc::RunOptions opt{common.threads};
        const auto t0 = std::chrono::steady_clock::now();

        if (cmd == "complexity") {
            const auto rows = mcnc::complexity_report(cfg);
            return emit(common.out, [&](std::ostream& os) { mcnc::write_complexity_csv(os, rows); });
        }

        std::vector<mcnc::SweepRecord> rows;
        if (cmd == "ber-sweep")
            rows = mcnc::run_ber_sweep(cfg, opt);
        else if (cmd == "sdr-sweep")
            rows = mcnc::run_sdr_sweep(cfg, opt);
        else if (cmd == "alpha-check")
            rows = mcnc::run_alpha_check(cfg, opt);
        else if (cmd == "berin-berout")
            rows = mcnc::run_berin_berout(cfg, opt);
        else
            rows = mcnc::run_convergence(cfg, opt);

        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cerr << cmd << ": " << rows.size() << " records in " << wall << " s\n";
        return emit(common.out, [&](std::ostream& os) { mcnc::write_sweep_csv(os, rows); });
    } catch (const mcnc::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const mcnc::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return exit_numerical;
    } catch (const mcnc::SizingError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }
}
