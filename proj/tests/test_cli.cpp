/* Copyright 2026 The mqtm-sim Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "mqtm/cli.hpp"
#include "mqtm/machine_text.hpp"
#include "mqtm/programs.hpp"
#include "mqtm/trials.hpp"

using namespace mqtm;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content = "") {
        path = std::string("/tmp/mqtm_test_") + name;
        if (!content.empty()) {
            std::ofstream f(path);
            f << content;
        }
    }
};

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
    std::ostringstream out, err;
    int rc = cli::dispatch(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return rc;
}

}  // namespace

TEST_CASE("input spec: basis strings and amplitude expressions") {
    std::string warn;
    auto basis = cli::parse_input_spec("011", &warn);
    REQUIRE(basis.size() == 8);
    CHECK(basis[3] == cplx(1, 0));

    auto amp = cli::parse_input_spec("0.6|0>+0.8|1>", &warn);
    REQUIRE(amp.size() == 2);
    CHECK(std::abs(amp[0] - cplx(0.6, 0)) < 1e-12);
    CHECK(std::abs(amp[1] - cplx(0.8, 0)) < 1e-12);
    CHECK(warn.empty());

    auto two = cli::parse_input_spec("0.6|0>+0.8|1>; 1|1>", &warn);
    REQUIRE(two.size() == 4);
    CHECK(std::abs(two[1] - cplx(0.6, 0)) < 1e-12);
    CHECK(std::abs(two[3] - cplx(0.8, 0)) < 1e-12);

    auto complex_amp = cli::parse_input_spec("0.5+0.5i|0>+0.5-0.5i|1>", &warn);
    REQUIRE(complex_amp.size() == 2);
    CHECK(std::abs(complex_amp[0] - cplx(0.5, 0.5)) < 1e-12);
    CHECK(std::abs(complex_amp[1] - cplx(0.5, -0.5)) < 1e-12);

    warn.clear();
    auto denorm = cli::parse_input_spec("3|0>+4|1>", &warn);
    CHECK(std::abs(denorm[0] - cplx(0.6, 0)) < 1e-12);
    CHECK(warn.find("normalizing") != std::string::npos);

    CHECK(cli::parse_input_spec("", &warn).empty());
    CHECK_THROWS(cli::parse_input_spec("0.5|2>", &warn));
    CHECK_THROWS(cli::parse_input_spec("xyz|0>", &warn));
}

TEST_CASE("run command: exit codes and JSON schema") {
    TempFile transfer("xfer.mqtm",
                      write_machine(standalone_machine(
                          build_state_transfer(CellId{1, 0}, CellId{0, 0}))));

    std::string out;
    int rc = run_cli({"run", transfer.path, "--input", "0.6|0>+0.8|1>", "--seed", "7"}, &out);
    CHECK(rc == 0);
    CHECK(out.find("halted: true") != std::string::npos);
    CHECK(out.find("magnitude 0.6") != std::string::npos);
    CHECK(out.find("magnitude 0.8") != std::string::npos);

    rc = run_cli({"run", transfer.path, "--input", "1", "--seed", "9", "--format", "json"}, &out);
    CHECK(rc == 0);
    auto j = nlohmann::json::parse(out);
    CHECK(j["halted"].get<bool>());
    CHECK(j.contains("steps"));
    CHECK(j.contains("outcomes"));
    CHECK(j.contains("output_state"));
    CHECK(j.contains("stats"));
    REQUIRE(j["output_state"].is_array());
    double mag1 = std::hypot(j["output_state"][1]["re"].get<double>(),
                             j["output_state"][1]["im"].get<double>());
    CHECK(mag1 == doctest::Approx(1.0).epsilon(1e-9));

    // fuel exhaustion exits 2 with a message
    TempFile loop("loop.mqtm");
    run_cli({"export", "loop", "-o", loop.path});
    std::string out2;
    rc = run_cli({"run", loop.path, "--max-steps", "100"}, &out2);
    CHECK(rc == 2);
    CHECK(out2.find("fuel exhausted at 100 steps") != std::string::npos);

    // errors exit 1
    TempFile bad("bad.mqtm", "tapes: inf\nnot a header\n");
    std::string err;
    rc = run_cli({"run", bad.path}, nullptr, &err);
    CHECK(rc == 1);
    CHECK(err.find("line 2") != std::string::npos);
}

TEST_CASE("identical invocations produce byte-identical reports") {
    TempFile tp("tp.mqtm");
    run_cli({"export", "teleport", "-o", tp.path});
    std::vector<std::string> args = {"run",    tp.path, "--input", "0.6|0>+0.8|1>",
                                     "--seed", "3",     "--trace"};
    std::string a, b;
    CHECK(run_cli(args, &a) == 0);
    CHECK(run_cli(args, &b) == 0);
    CHECK(a == b);
    CHECK(a.find("trace:") != std::string::npos);
}

TEST_CASE("trials command aggregates statistics and exact comparison") {
    TempFile wr("write0.mqtm");
    run_cli({"export", "write0", "-o", wr.path});
    std::string out;
    int rc = run_cli({"trials", wr.path, "--input", "1", "--trials", "400", "--seed", "11",
                      "--max-steps", "80", "--format", "json"},
                     &out);
    CHECK(rc == 0);
    auto j = nlohmann::json::parse(out);
    CHECK(j["trials"].get<int>() == 400);
    CHECK(j["halted_fraction"].get<double>() == doctest::Approx(1.0));
    REQUIRE(j.contains("exact_vs_empirical"));
    double total_exact = 0;
    for (const auto& probe : j["exact_vs_empirical"]) {
        total_exact += probe["exact"].get<double>();
        CHECK(std::abs(probe["exact"].get<double>() - probe["empirical"].get<double>()) < 0.2);
    }
    CHECK(total_exact >= 0.99);  // enumeration truncates the geometric tail

    // deterministic machine: a single outcome with frequency 1
    TempFile inc("inc.mqtm");
    run_cli({"export", "increment3", "-o", inc.path});
    rc = run_cli({"trials", inc.path, "--input", "010", "--trials", "50", "--format", "json"},
                 &out);
    CHECK(rc == 0);
    j = nlohmann::json::parse(out);
    CHECK(j["halted_fraction"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("compile command writes a machine that re-parses equivalently") {
    TempFile ma("ma.mqtm", R"(
tapes: inf
heads: 2 (0,0)
moves: ZxZ
observables: A
initial: q0
final: qf
start: (0,1)
q0 _ -> qf XX (0,0)
)");
    TempFile out_file("ma_f.mqtm");
    std::string report;
    int rc = run_cli({"compile", ma.path, "--from", "A", "--to", "F", "-o", out_file.path},
                     &report);
    CHECK(rc == 0);
    CHECK(report.find("target_model: F") != std::string::npos);
    CHECK(report.find("inserted_gadget_count: 2") != std::string::npos);

    MachineDefinition lowered = load_machine_file(out_file.path);
    MachineDefinition again = parse_machine(write_machine(lowered));
    CHECK(equivalent_machines(lowered, again));

    std::string vout;
    CHECK(run_cli({"validate", out_file.path, "--model", "F"}, &vout) == 0);
    CHECK(vout == "[]\n");

    // json report
    rc = run_cli({"compile", ma.path, "--from", "A", "--to", "G", "--format", "json", "-o",
                  out_file.path},
                 &report);
    CHECK(rc == 0);
    auto j = nlohmann::json::parse(report);
    CHECK(j["target_model"] == "G");

    std::string err;
    rc = run_cli({"compile", ma.path, "--from", "A", "--to", "E"}, nullptr, &err);
    CHECK(rc == 1);  // teleport target needs the teleport backend
    rc = run_cli({"compile", ma.path, "--from", "A", "--to", "E", "--backend", "teleport",
                  "-o", out_file.path},
                 &report);
    CHECK(rc == 0);
    CHECK(run_cli({"validate", out_file.path, "--model", "E"}, &vout) == 0);
}

TEST_CASE("validate command: conformant and violating machines") {
    TempFile inc("inc2.mqtm");
    run_cli({"export", "increment3", "-o", inc.path});
    std::string out;
    CHECK(run_cli({"validate", inc.path, "--model", "C"}, &out) == 0);
    CHECK(out == "[]\n");

    // single-head machines with 1-qubit observables conform to model B too
    CHECK(run_cli({"validate", inc.path, "--model", "B"}, &out) == 0);

    TempFile xf("xf.mqtm");
    run_cli({"export", "transfer", "-o", xf.path});
    int rc = run_cli({"validate", xf.path, "--model", "B"}, &out);
    CHECK(rc == 1);
    CHECK(out.find("head count") != std::string::npos);

    // a model-G machine also validates against model F
    TempFile g("g.mqtm", R"(
tapes: 1,inf
heads: 2 (0,1)
moves: {0}x{-1,0,1}
observables: G
initial: q0
final: qf
q0 _ -> qf IZ (0,1)
)");
    CHECK(run_cli({"validate", g.path, "--model", "F"}, &out) == 0);
}

TEST_CASE("export writes loadable machines for every gadget") {
    for (const char* gadget : {"transfer", "bellprep", "teleport", "write0", "write1",
                               "write0-literal", "bitflip", "increment3", "loop"}) {
        std::string text;
        CHECK(run_cli({"export", gadget}, &text) == 0);
        MachineDefinition m = parse_machine(text);
        CHECK(m.check_definition().empty());
    }
    std::string err;
    CHECK(run_cli({"export", "nonsense"}, nullptr, &err) == 1);
    CHECK(err.find("unknown gadget") != std::string::npos);
}

TEST_CASE("unknown flags and commands are rejected") {
    std::string err;
    CHECK(run_cli({"run", "/nonexistent.mqtm"}, nullptr, &err) == 1);
    CHECK(run_cli({"frobnicate"}, nullptr, &err) == 1);
    CHECK(run_cli({"run", "x", "--bogus", "1"}, nullptr, &err) == 1);
}

TEST_CASE("shipped machine files stay in sync with the exports") {
    for (const char* gadget : {"transfer", "bellprep", "teleport", "write0", "write1",
                               "bitflip", "increment3", "loop"}) {
        std::string text;
        REQUIRE(run_cli({"export", gadget}, &text) == 0);
        MachineDefinition exported = parse_machine(text);
        MachineDefinition shipped =
            load_machine_file(std::string(MQTM_MACHINES_DIR) + "/" + gadget + ".mqtm");
        CHECK_MESSAGE(equivalent_machines(exported, shipped), "stale machines/" << gadget
                                                                                << ".mqtm");
    }
}

TEST_CASE("trial frequencies converge to exact branch probabilities (3 sigma)") {
    struct Case {
        const char* gadget;
        const char* input;
        std::int64_t fuel;
    };
    for (const Case& cs : {Case{"write0", "1", 40}, Case{"transfer", "0.6|0>+0.8|1>", 40},
                           Case{"bellprep", "", 10}}) {
        std::string text;
        REQUIRE(run_cli({"export", cs.gadget}, &text) == 0);
        MachineDefinition m = parse_machine(text);
        std::string warn;
        RegisterState input = make_input(m, cli::parse_input_spec(cs.input, &warn));

        BranchOptions bo;
        bo.max_steps = cs.fuel;
        bo.prune_threshold = 1e-7;
        BranchTree tree = branch_tree(m, input, bo);

        RunOptions opts;
        opts.max_steps = cs.fuel;
        const std::int64_t n = 4000;
        TrialStats stats = run_trials(m, input, n, 20250101, opts, &tree);
        REQUIRE(!stats.branch_compare.empty());
        for (const auto& probe : stats.branch_compare) {
            double sigma = std::sqrt(probe.exact * (1 - probe.exact) / static_cast<double>(n));
            CHECK_MESSAGE(std::abs(probe.empirical - probe.exact) <= 3 * sigma + 2e-3,
                          cs.gadget << " signature " << probe.signature << ": empirical "
                                    << probe.empirical << " vs exact " << probe.exact);
        }
    }
}

#ifdef _OPENMP
#include <omp.h>
TEST_CASE("trial statistics do not depend on the thread count") {
    TempFile tp("tpthreads.mqtm");
    run_cli({"export", "teleport", "-o", tp.path});
    MachineDefinition m = load_machine_file(tp.path);
    RegisterState input = make_input(m, {cplx(0.8, 0), cplx(0, 0.6)});
    RunOptions opts;
    opts.max_steps = 4000;

    int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    TrialStats serial = run_trials(m, input, 500, 77, opts);
    omp_set_num_threads(saved);
    TrialStats parallel = run_trials(m, input, 500, 77, opts);

    CHECK(serial.steps_per_trial == parallel.steps_per_trial);
    CHECK(serial.signatures_per_trial == parallel.signatures_per_trial);
    CHECK(serial.outcome_histogram == parallel.outcome_histogram);
}
#endif

TEST_CASE("random init and register cap flags reach the simulator") {
    TempFile bell("bellinit.mqtm");
    run_cli({"export", "bellprep", "-o", bell.path});
    std::string a, b;
    CHECK(run_cli({"run", bell.path, "--seed", "4", "--init", "random", "--init-seed", "5",
                   "--trace"},
                  &a) == 0);
    CHECK(run_cli({"run", bell.path, "--seed", "4", "--init", "random", "--init-seed", "6",
                   "--trace"},
                  &b) == 0);
    CHECK(a != b);  // different unknown initial states, different outcome odds

    // a 15-cell sweep exceeds the default register cap but fits a raised one
    std::string sweep = "tapes: inf\nheads: 1 (0)\nmoves: {-1,0,1}\nobservables: C\n"
                        "initial: q0\nfinal: qf\n";
    for (int i = 0; i < 15; i++)
        sweep += "c" + std::to_string(i) + " _ -> c" + std::to_string(i + 1) + " Z (1)\n";
    sweep += "q0 _ -> c0 Z (1)\nc15 _ -> qf Z (0)\n";
    TempFile wide("wide.mqtm", sweep);
    std::string err;
    CHECK(run_cli({"run", wide.path}, nullptr, &err) == 1);
    CHECK(err.find("cap") != std::string::npos);
    CHECK(run_cli({"run", wide.path, "--max-qubits", "20"}) == 0);
}
