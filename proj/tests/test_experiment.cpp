#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "p2psim/experiment.hpp"

using namespace p2psim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("p2psim_test_" + name);
    fs::remove_all(p);
    return p;
}

Config tiny()
{
    Config c;
    c.node_count = 10;
    c.peer_count = 2;
    c.block_interval = 20;
    c.duration = 120;
    c.replications = 2;
    return c;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(P2PSIM_CLI) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("cell seeds are pairwise distinct")
{
    for (std::uint64_t master : {0ULL, 1ULL, 2ULL, 12345ULL}) {
        std::set<std::uint64_t> seeds;
        std::size_t n = 0;
        for (Strategy s : {Strategy::normal, Strategy::random, Strategy::mixed}) {
            for (int p : {4, 8}) {
                for (double rate : {3.0, 6.0}) {
                    for (int r = 1; r <= 100; ++r) {
                        seeds.insert(derive_seed(master, ExperimentCell{s, p, rate, r}));
                        ++n;
                    }
                }
            }
        }
        CHECK(seeds.size() == n);
    }
    CHECK(derive_seed(1, {Strategy::normal, 8, 3, 1}) == derive_seed(1, {Strategy::normal, 8, 3, 1}));
    CHECK(derive_seed(1, {Strategy::normal, 8, 3, 1}) != derive_seed(2, {Strategy::normal, 8, 3, 1}));
    CHECK_THROWS(derive_seed(1, {Strategy::normal, -1, 3, 1}));
}

TEST_CASE("cell paths")
{
    CHECK(cell_path({Strategy::normal, 8, 3, 1}).generic_string() == "normal/P8/lam3/run1");
    CHECK(cell_path({Strategy::mixed, 4, 6, 10}).generic_string() == "mixed/P4/lam6/run10");
    CHECK(cell_path({Strategy::random, 4, 1.5, 2}).generic_string() == "random/P4/lam1.5/run2");
}

TEST_CASE("run_cell writes the full dataset set")
{
    const fs::path out = scratch("cell");
    const RunOutcome r = run_cell({Strategy::normal, 2, 3, 1}, tiny(), out);
    const fs::path dir = out / "normal/P2/lam3/run1";
    for (const char* f : {"generation.csv", "mempool.csv", "chain.csv", "blocktree.csv", "forks.csv", "blockprop.csv",
                          "metrics.csv", "losses.csv", "config.txt", "run.csv", "topology.csv"}) {
        CHECK_MESSAGE(fs::exists(dir / f), f);
    }
    CHECK_FALSE(fs::exists(dir / "trace.csv"));
    CHECK(slurp(dir / "chain.csv").rfind("hash,b_size,b_t,B_height\ngenesis,80,0.000000000,0\n", 0) == 0);
    CHECK(slurp(dir / "mempool.csv").rfind("txid,t_a,t_size,t_fee,B_height\n", 0) == 0);
    CHECK(slurp(dir / "blocktree.csv").rfind("hash,B_height,branchlen,status\n", 0) == 0);
    CHECK(slurp(dir / "generation.csv").rfind("node,kind,id,t_g\n", 0) == 0);
    CHECK(r.summary.generated == r.summary.confirmed + r.summary.mempool_residue + r.summary.losses);
    CHECK_FALSE(fs::exists(out / ".staging" / "normal/P2/lam3/run1.tmp"));

    run_cell({Strategy::normal, 2, 3, 1}, tiny(), out, RunOptions{true});
    CHECK(fs::exists(dir / "trace.csv"));
    fs::remove_all(out);
}

TEST_CASE("matrix: one summary row per cell with CI columns")
{
    const fs::path out = scratch("matrix");
    MatrixSpec spec;
    spec.strategies = {Strategy::normal, Strategy::random};
    spec.peers = {2};
    spec.tx_rates = {3, 6};
    spec.replications = 2;
    spec.jobs = 2;
    const auto rows = run_matrix(tiny(), spec, out);
    CHECK(rows.size() == 4);
    for (const auto& row : rows) CHECK(row.replications == 2);
    std::ifstream in(out / "summary.csv");
    std::string header, line;
    std::getline(in, header);
    CHECK(header.find("propagation_mean,propagation_ci95") != std::string::npos);
    CHECK(header.find("fork_count_mean") != std::string::npos);
    CHECK(header.find("overlap_mean,overlap_std") != std::string::npos);
    int n = 0;
    while (std::getline(in, line)) ++n;
    CHECK(n == 4);
    CHECK(fs::exists(out / "random/P2/lam6/run2/metrics.csv"));
    CHECK_FALSE(fs::exists(out / ".staging"));
    fs::remove_all(out);
}

TEST_CASE("matrix failure aborts and names completed runs")
{
    const fs::path out = scratch("fail");
    fs::create_directories(out / "normal/P2");
    // A plain file where the lam6 directory should go: those runs cannot be stored.
    std::ofstream(out / "normal/P2/lam6") << "x";
    MatrixSpec spec;
    spec.strategies = {Strategy::normal};
    spec.peers = {2};
    spec.tx_rates = {3, 6};
    spec.replications = 2;
    bool threw = false;
    try {
        run_matrix(tiny(), spec, out);
    } catch (const MatrixError& e) {
        threw = true;
        const std::string what = e.what();
        CHECK(what.find("normal/P2/lam6/run1") != std::string::npos);
        CHECK(what.find("completed runs: normal/P2/lam3/run1 normal/P2/lam3/run2") != std::string::npos);
    }
    CHECK(threw);
    CHECK_FALSE(fs::exists(out / "summary.csv"));
    fs::remove_all(out);
}

TEST_CASE("aggregate over replications")
{
    RunOutcome a, b;
    a.cell = b.cell = {Strategy::mixed, 8, 6, 1};
    a.summary.mean_propagation = 1.0;
    b.summary.mean_propagation = 3.0;
    a.summary.fork_count = 1;
    b.summary.fork_count = 3;
    a.summary.overlaps = {0.8};
    b.summary.overlaps = {1.0, 0.9};
    a.summary.fork_gaps = {4.0};
    b.summary.fork_gaps = {2.0, 9.0};
    const CellSummary s = aggregate_cell({a, b});
    CHECK(s.propagation.mean == 2.0);
    CHECK(s.forks.mean == 2.0);
    CHECK(s.fork_total == 4);
    CHECK(s.overlap_n == 3);
    CHECK(s.overlap_mean == doctest::Approx(0.9));
    CHECK(s.overlap_std == doctest::Approx(0.1));
    CHECK(*s.fork_gap_median == 4.0);
    CHECK_THROWS(aggregate_cell({}));
}

TEST_CASE("CLI exit codes")
{
    const fs::path out = scratch("cli");
    CHECK(run_cli("run-one --nodes 10 --peers 2 --duration-sec 60 --out-dir " + out.string()) == 0);
    CHECK(fs::exists(out / "normal/P2/lam3/run1/chain.csv"));
    CHECK(run_cli("run-one --nodes 10 --peers 9 --out-dir " + out.string()) == 2);
    CHECK(run_cli("run-one --strategy ring") == 2);
    CHECK(run_cli("run-one --no-such-flag") == 2);
    CHECK(run_cli("run-one --tx_rate 0") == 2);
    CHECK(run_cli("run-one --config /nonexistent/cfg.txt") == 2);
    CHECK(run_cli("dump-topology --nodes 10 --peers 2 --out " + (out / "topo.csv").string()) == 0);
    CHECK(slurp(out / "topo.csv").rfind("src,dst\n1,2\n1,3\n", 0) == 0);
    // Output root that cannot be created: runtime failure.
    std::ofstream(out / "blocker") << "x";
    CHECK(run_cli("run-one --nodes 10 --peers 2 --duration-sec 10 --out-dir " + (out / "blocker").string()) == 3);
    CHECK(run_cli("run --strategies random --peer-counts 2 --tx-rates 3 --replications 2 --nodes 10 "
                  "--duration-sec 30 --jobs 2 --out-dir " +
                  (out / "m").string()) == 0);
    CHECK(fs::exists(out / "m/summary.csv"));
    fs::remove_all(out);
}

}
