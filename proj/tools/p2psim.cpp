// Command-line driver: run the experiment matrix, a single cell, or dump an overlay.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "p2psim/config.hpp"
#include "p2psim/experiment.hpp"
#include "p2psim/sim_core.hpp"
#include "p2psim/topology.hpp"

namespace fs = std::filesystem;
using namespace p2psim;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// Flags shared by every subcommand. Values stay unset unless given so that
// the config file is only overridden where the user asked.
struct CommonFlags {
    std::string config_file;
    std::optional<int> nodes;
    std::optional<int> peers;
    std::optional<std::string> strategy;
    std::optional<double> tx_rate_per_min;
    std::optional<double> block_interval_sec;
    std::optional<double> mean_link_delay_ms;
    std::optional<double> bandwidth_mbps;
    std::optional<double> validation_ms;
    std::optional<double> duration_sec;
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    bool oracle_mode{false};
    bool trace{false};
    std::string out_dir{"out"};
    // --<config key> raw overrides, applied before the unit-scaled flags above.
    std::map<std::string, std::string> raw;
};

std::string num(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void add_common(CLI::App& app, CommonFlags& f)
{
    app.add_option("--config", f.config_file, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--nodes", f.nodes, "number of nodes C");
    app.add_option("--peers", f.peers, "outgoing peers per node P");
    app.add_option("--strategy", f.strategy, "normal | random | mixed");
    app.add_option("--tx-rate-per-min", f.tx_rate_per_min, "transactions per minute per node");
    app.add_option("--block-interval-sec", f.block_interval_sec, "network-wide mean block interval");
    app.add_option("--mean-link-delay-ms", f.mean_link_delay_ms, "mean per-message link delay");
    app.add_option("--bandwidth-mbps", f.bandwidth_mbps, "per-link bandwidth (inf allowed)");
    app.add_option("--validation-ms", f.validation_ms, "tx and block validation time");
    app.add_option("--duration-sec,--duration", f.duration_sec, "generation horizon in simulated seconds");
    app.add_option("--seed", f.seed, "master seed");
    app.add_option("--replications", f.replications, "replications per cell");
    app.add_option("--out-dir", f.out_dir, "output root")->capture_default_str();
    app.add_flag("--trace", f.trace, "write a per-run protocol trace");
    app.add_flag("--oracle-mode", f.oracle_mode,
                 "zero-cost inv/getdata, fixed payload delay, infinite bandwidth, free validation");

    // Every Config key is also accepted verbatim.
    for (const auto& [key, value] : Config{}.to_map()) {
        if (app.get_option_no_throw("--" + key) != nullptr) continue;
        app.add_option_function<std::string>(
               "--" + key, [&f, k = key](const std::string& v) { f.raw[k] = v; }, "config key")
            ->group("Config keys");
    }
}

Config build_config(const CommonFlags& f)
{
    Config c;
    if (!f.config_file.empty()) c = load_config(f.config_file);
    for (const auto& [k, v] : f.raw) c.set(k, v);
    if (f.nodes) c.node_count = *f.nodes;
    if (f.peers) c.peer_count = *f.peers;
    if (f.strategy) c.strategy = parse_strategy(*f.strategy);
    if (f.tx_rate_per_min) c.tx_rate = *f.tx_rate_per_min;
    if (f.block_interval_sec) c.block_interval = *f.block_interval_sec;
    if (f.mean_link_delay_ms) c.mean_link_delay = *f.mean_link_delay_ms / 1000.0;
    if (f.bandwidth_mbps) c.set("bandwidth", num(*f.bandwidth_mbps * 1e6));
    if (f.validation_ms) {
        c.tx_validation_delay = *f.validation_ms / 1000.0;
        c.block_validation_delay = *f.validation_ms / 1000.0;
    }
    if (f.duration_sec) c.duration = *f.duration_sec;
    if (f.seed) c.master_seed = *f.seed;
    if (f.replications) c.replications = *f.replications;
    if (f.oracle_mode) c.enable_oracle_mode(c.mean_link_delay);
    c.validate();
    return c;
}

ExperimentCell single_cell(const Config& c, int replication)
{
    return ExperimentCell{c.strategy, c.peer_count, c.tx_rate, replication};
}

void print_run(const RunOutcome& r, const fs::path& root)
{
    const auto& s = r.summary;
    std::cout << (root / cell_path(r.cell)).string() << "\n"
              << "  seed " << r.seed << ", events " << r.events << "\n"
              << "  generated " << s.generated << " = confirmed " << s.confirmed << " + mempool " << s.mempool_residue
              << " + losses " << s.losses << "\n"
              << "  mean propagation " << s.mean_propagation << " s, mean confirmation " << s.mean_confirmation
              << " s\n"
              << "  blocks " << s.blocks << ", forks " << s.fork_count << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Discrete-event simulator of a Bitcoin-like peer-to-peer overlay"};
    app.require_subcommand(1);

    CommonFlags run_flags, one_flags, dump_flags;

    auto* run = app.add_subcommand("run", "run the strategy x P x rate matrix with replications");
    add_common(*run, run_flags);
    std::vector<std::string> strategies{"normal", "random", "mixed"};
    std::vector<int> peer_counts{4, 8};
    std::vector<double> tx_rates{3.0, 6.0};
    int jobs = 1;
    run->add_option("--strategies", strategies, "strategies to run")->capture_default_str();
    run->add_option("--peer-counts", peer_counts, "P values to run")->capture_default_str();
    run->add_option("--tx-rates", tx_rates, "per-node rates (t/min) to run")->capture_default_str();
    run->add_option("--jobs,-j", jobs, "simultaneous runs")->check(CLI::PositiveNumber)->capture_default_str();

    auto* one = app.add_subcommand("run-one", "run a single replication of one cell");
    add_common(*one, one_flags);
    int one_replication = 1;
    one->add_option("--replication", one_replication, "replication index (1-based)")->capture_default_str();

    auto* dump = app.add_subcommand("dump-topology", "write the overlay of one replication as src,dst CSV");
    add_common(*dump, dump_flags);
    int dump_replication = 1;
    std::string dump_out;
    dump->add_option("--replication", dump_replication, "replication index (1-based)")->capture_default_str();
    dump->add_option("--out", dump_out, "output file (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    Config config;
    CommonFlags* flags = run->parsed() ? &run_flags : one->parsed() ? &one_flags : &dump_flags;
    MatrixSpec spec;
    try {
        config = build_config(*flags);
        if (run->parsed()) {
            spec.strategies.clear();
            if (flags->strategy) {
                spec.strategies.push_back(config.strategy);
            } else {
                for (const auto& s : strategies) spec.strategies.push_back(parse_strategy(s));
            }
            spec.peers = flags->peers ? std::vector<int>{config.peer_count} : peer_counts;
            spec.tx_rates = flags->tx_rate_per_min ? std::vector<double>{config.tx_rate} : tx_rates;
            spec.replications = config.replications;
            spec.jobs = jobs;
            spec.run.trace = flags->trace;
            if (spec.replications < 1) throw ConfigError("replications: must be at least 1");
            for (Strategy s : spec.strategies) {
                for (int p : spec.peers) {
                    for (double rate : spec.tx_rates) cell_config(config, ExperimentCell{s, p, rate, 1}).validate();
                }
            }
        }
        if (one->parsed() && one_replication < 1) throw ConfigError("replication: must be at least 1");
        if (dump->parsed() && dump_replication < 1) throw ConfigError("replication: must be at least 1");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }

    try {
        const fs::path root = flags->out_dir;
        if (run->parsed()) {
            const auto rows = run_matrix(config, spec, root, &std::cerr);
            std::cout << "wrote " << rows.size() << " cells to " << (root / "summary.csv").string() << "\n";
        } else if (one->parsed()) {
            const auto outcome = run_cell(single_cell(config, one_replication), config, root, {flags->trace});
            print_run(outcome, root);
        } else {
            const ExperimentCell cell = single_cell(config, dump_replication);
            RngStream rng(derive_seed(config.master_seed, cell), "topology");
            const OverlayBuild build = build_overlay(config, rng);
            if (dump_out.empty()) {
                build.graph.write_edge_csv(std::cout);
            } else {
                std::ofstream out(dump_out, std::ios::binary);
                if (!out) throw std::runtime_error("cannot write " + dump_out);
                build.graph.write_edge_csv(out);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
