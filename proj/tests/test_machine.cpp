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

#include <cmath>

#include "doctest.h"
#include "mqtm/machine.hpp"
#include "mqtm/trials.hpp"
#include "test_support.hpp"

using namespace mqtm;
using namespace mqtm::testing;

namespace {

// Single-head machine over one infinite tape measuring `obs` once.
MachineDefinition one_shot(const std::string& obs) {
    MachineDefinition m;
    m.tapes = {TapeSpec{}};
    m.head_tape = {0};
    m.moves = MoveSet::explicit1({-1, 0, 1});
    m.lambda0 = OutcomeTag::all_plus(1);
    m.start_positions = {0};
    int o = m.intern_observable(obs);
    m.initial_state = m.intern_state("q0");
    m.final_state = m.intern_state("qf");
    for (int i = 0; i < 2; i++)
        m.set_transition(m.initial_state, OutcomeTag::from_index(i, 1),
                         Transition{m.final_state, o, {0}});
    return m;
}

MachineDefinition two_head_machine() {
    MachineDefinition m;
    m.tapes = {TapeSpec{}};
    m.head_tape = {0, 0};
    m.moves = MoveSet::all(2);
    m.lambda0 = OutcomeTag::all_plus(2);
    m.start_positions = {0, 1};
    m.input_tape = 0;
    m.input_origin = 0;
    m.output_head = 0;
    m.output_width = 2;
    m.initial_state = m.intern_state("q0");
    m.final_state = m.intern_state("qf");
    return m;
}

}  // namespace

TEST_CASE("measuring an eigenstate is deterministic and leaves it unchanged") {
    MachineDefinition m = one_shot("Z");
    RegisterState input = make_basis_input(m, "0");
    Configuration cfg = initial_configuration(m, input);
    SplitMix64 rng(1);
    RunOptions opts;
    MeasureOutcome mo = measure(cfg, m, named_observable("Z"), rng, opts);
    CHECK(mo.tag.v[0] == +1);
    CHECK(mo.probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(cfg.state.amplitudes()[0] - cplx(1, 0)) < 1e-12);
}

TEST_CASE("XX on |00> splits evenly into the two parity states") {
    RegisterState s = RegisterState::product(
        std::vector<CellId>{CellId{0, 0}, CellId{0, 1}},
        std::vector<QubitInit>{QubitInit::zero(), QubitInit::zero()});
    auto branches = enumerate_measurement(s, "XX", {CellId{0, 0}, CellId{0, 1}});
    REQUIRE(branches.size() == 2);
    const double r = 1.0 / std::sqrt(2.0);
    RegisterState minus = RegisterState::from_amplitudes({CellId{0, 0}, CellId{0, 1}},
                                                         {r, 0, 0, -r});
    RegisterState plus = RegisterState::from_amplitudes({CellId{0, 0}, CellId{0, 1}},
                                                        {r, 0, 0, r});
    CHECK(branches[0].outcome == -1);
    CHECK(branches[0].probability == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(RegisterState::fidelity(branches[0].post, minus) > 1.0 - 1e-12);
    CHECK(branches[1].probability == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(RegisterState::fidelity(branches[1].post, plus) > 1.0 - 1e-12);
}

TEST_CASE("a stabilizer eigenstate gives its outcome with certainty") {
    RegisterState bell = bell_phi_plus(CellId{0, 0}, CellId{0, 1});
    auto branches = enumerate_measurement(bell, "ZZ", {CellId{0, 0}, CellId{0, 1}});
    REQUIRE(branches.size() == 1);
    CHECK(branches[0].outcome == +1);
    CHECK(branches[0].probability == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("step: measurement then movement, driven by the last outcome") {
    MachineDefinition m = two_head_machine();
    int zz = m.intern_observable("ZZ");
    int q1 = m.intern_state("q1");
    for (int i = 0; i < 4; i++)
        m.set_transition(m.initial_state, OutcomeTag::from_index(i, 2),
                         Transition{q1, zz, {1, 0}});

    RegisterState input = make_basis_input(m, "00");
    Configuration cfg = initial_configuration(m, input);
    SplitMix64 rng(0);
    RunOptions opts;
    TraceStep ts = step(cfg, m, rng, opts);
    CHECK(ts.outcome == OutcomeTag::all_plus(2));
    CHECK(cfg.heads == std::vector<std::int64_t>{1, 1});
    CHECK(cfg.classical_state == q1);
    CHECK(cfg.step_count == 1);
    CHECK(std::abs(cfg.state.amplitudes()[0] - cplx(1, 0)) < 1e-12);
}

TEST_CASE("no-op observables skip measurement and keep the last outcome") {
    MachineDefinition m = two_head_machine();
    int noop = m.intern_observable("II");
    int q1 = m.intern_state("q1");
    OutcomeTag weird = OutcomeTag::parse("(-1,+1)", 2);
    m.lambda0 = weird;
    m.set_transition(m.initial_state, weird, Transition{q1, noop, {0, 1}});

    Configuration cfg = initial_configuration(m, RegisterState());
    SplitMix64 rng(0);
    RunOptions opts;
    TraceStep ts = step(cfg, m, rng, opts);
    CHECK_FALSE(ts.measured);
    CHECK(cfg.last_outcome == weird);               // untouched
    CHECK(cfg.state.num_cells() == 0);              // nothing materialized
    CHECK(cfg.heads == std::vector<std::int64_t>{0, 2});
}

TEST_CASE("stepping a halted machine is an error") {
    MachineDefinition m = one_shot("Z");
    Configuration cfg = initial_configuration(m, make_basis_input(m, "0"));
    cfg.classical_state = m.final_state;
    SplitMix64 rng(0);
    RunOptions opts;
    CHECK_THROWS_WITH_AS(step(cfg, m, rng, opts), doctest::Contains("halted"),
                         std::runtime_error);
}

TEST_CASE("run: single transition machine reads out the input") {
    MachineDefinition m = one_shot("Z");
    RunResult r = run(m, make_basis_input(m, "1"), RunOptions{});
    CHECK(r.halted);
    CHECK(r.final_config.step_count == 1);
    CHECK(r.final_config.last_outcome.v[0] == -1);
    CHECK(r.output_cells == std::vector<CellId>{CellId{0, 0}});
}

TEST_CASE("run: fuel exhaustion reports a non-halt") {
    MachineDefinition m = one_shot("Z");
    // loop forever instead
    m.delta.clear();
    int noop = m.intern_observable("I");
    for (int i = 0; i < 2; i++)
        m.set_transition(m.initial_state, OutcomeTag::from_index(i, 1),
                         Transition{m.initial_state, noop, {1}});
    RunOptions opts;
    opts.max_steps = 10;
    RunResult r = run(m, RegisterState(), opts);
    CHECK_FALSE(r.halted);
    CHECK(r.final_config.step_count == 10);
}

TEST_CASE("run is reproducible for a fixed seed") {
    MachineDefinition m = one_shot("X");
    RunOptions opts;
    opts.seed = 1234;
    RunResult a = run(m, make_basis_input(m, "0"), opts);
    RunResult b = run(m, make_basis_input(m, "0"), opts);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); i++) {
        CHECK(a.trace[i].outcome == b.trace[i].outcome);
        CHECK(a.trace[i].branch_probability == b.trace[i].branch_probability);
    }
}

TEST_CASE("repeat measurement of any named observable is stable") {
    for (const char* name : {"XX", "ZZ", "XZ", "ZX", "XI", "ZI", "IX", "IZ", "XX+YX", "XX+XY"}) {
        for (std::uint64_t seed = 1; seed <= 5; seed++) {
            MachineDefinition m = two_head_machine();
            Observable obs = named_observable(name);
            RegisterState input = random_product_state({CellId{0, 0}, CellId{0, 1}}, seed * 31);
            Configuration cfg = initial_configuration(m, input);
            SplitMix64 rng(seed);
            RunOptions opts;
            MeasureOutcome first = measure(cfg, m, obs, rng, opts);
            MeasureOutcome second = measure(cfg, m, obs, rng, opts);
            CHECK(first.tag == second.tag);
            CHECK(second.probability == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("branch_tree: coin flip, deterministic machine, mass conservation") {
    MachineDefinition m = one_shot("Z");
    const double r = 1.0 / std::sqrt(2.0);
    RegisterState plus = make_input(m, {r, r});
    BranchOptions bo;
    bo.max_steps = 4;
    BranchTree tree = branch_tree(m, plus, bo);
    REQUIRE(tree.branches.size() == 2);
    CHECK(tree.branches[0].probability == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(tree.branches[1].probability == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(tree.total_mass() == doctest::Approx(1.0).epsilon(1e-9));

    BranchTree det = branch_tree(m, make_basis_input(m, "0"), bo);
    REQUIRE(det.branches.size() == 1);
    CHECK(det.branches[0].probability == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("branch_tree respects the branch cap") {
    MachineDefinition m = two_head_machine();
    int xx = m.intern_observable("XX");
    int q1 = m.intern_state("q1");
    int q2 = m.intern_state("q2");
    for (int i = 0; i < 4; i++) {
        m.set_transition(m.initial_state, OutcomeTag::from_index(i, 2),
                         Transition{q1, xx, {0, 0}});
        m.set_transition(q1, OutcomeTag::from_index(i, 2), Transition{q2, xx, {2, 2}});
        m.set_transition(q2, OutcomeTag::from_index(i, 2), Transition{m.final_state, xx, {0, 0}});
    }
    BranchOptions bo;
    bo.max_steps = 8;
    bo.branch_cap = 2;
    CHECK_THROWS_WITH_AS(branch_tree(m, RegisterState(), bo), doctest::Contains("branch cap"),
                         std::runtime_error);
}

TEST_CASE("overlapping heads with a joint measurement fail loudly") {
    MachineDefinition m = two_head_machine();
    m.start_positions = {0, 0};
    int xx = m.intern_observable("XX");
    for (int i = 0; i < 4; i++)
        m.set_transition(m.initial_state, OutcomeTag::from_index(i, 2),
                         Transition{m.final_state, xx, {0, 0}});
    CHECK_THROWS_WITH_AS(run(m, RegisterState(), RunOptions{}),
                         doctest::Contains("overlapping heads"), std::runtime_error);
}

TEST_CASE("movement validation: off-tape and outside the movement set") {
    MachineDefinition m = one_shot("Z");
    m.tapes = {TapeSpec{2}};  // two cells only
    m.delta.clear();
    int z = m.intern_observable("Z");
    for (int i = 0; i < 2; i++)
        m.set_transition(m.initial_state, OutcomeTag::from_index(i, 1),
                         Transition{m.final_state, z, {-1}});
    CHECK_THROWS_WITH_AS(run(m, make_basis_input(m, "0"), RunOptions{}),
                         doctest::Contains("moved off tape"), std::runtime_error);

    MachineDefinition m2 = one_shot("Z");
    m2.delta.clear();
    int z2 = m2.intern_observable("Z");
    for (int i = 0; i < 2; i++)
        m2.set_transition(m2.initial_state, OutcomeTag::from_index(i, 1),
                         Transition{m2.final_state, z2, {5}});
    auto problems = m2.check_definition();
    bool mentions_move = false;
    for (const auto& p : problems) mentions_move |= p.find("movement") != std::string::npos;
    CHECK(mentions_move);
}

TEST_CASE("a missing transition is a runtime diagnostic") {
    MachineDefinition m = one_shot("Z");
    m.delta.erase({m.initial_state, OutcomeTag::all_plus(1).index()});
    CHECK_THROWS_WITH_AS(run(m, make_basis_input(m, "0"), RunOptions{}),
                         doctest::Contains("no transition"), std::runtime_error);
}

TEST_CASE("validate_model matches the resource tables") {
    // A machine using only X/Z with unit moves conforms to model C.
    MachineDefinition mc = one_shot("Z");
    int x = mc.intern_observable("X");
    int q1 = mc.intern_state("more");
    mc.delta.clear();
    for (int i = 0; i < 2; i++) {
        mc.set_transition(mc.initial_state, OutcomeTag::from_index(i, 1),
                          Transition{q1, x, {1}});
        mc.set_transition(q1, OutcomeTag::from_index(i, 1),
                          Transition{mc.final_state, mc.observable_index.at("Z"), {-1}});
    }
    CHECK(validate_model(mc, ResourceModel::get('C')).empty());

    // Two-qubit observables violate model B's one-qubit restriction.
    MachineDefinition ma = two_head_machine();
    int xx = ma.intern_observable("XX");
    for (int i = 0; i < 4; i++)
        ma.set_transition(ma.initial_state, OutcomeTag::from_index(i, 2),
                          Transition{ma.final_state, xx, {0, 0}});
    auto vb = validate_model(ma, ResourceModel::get('B'));
    bool arity = false;
    for (const auto& v : vb) arity |= v.find("observable arity violation") != std::string::npos;
    CHECK(arity);

    // Movement (0,5) is outside D_G.
    MachineDefinition mg;
    mg.tapes = {TapeSpec{1}, TapeSpec{}};
    mg.head_tape = {0, 1};
    mg.moves.comps.push_back(MoveComponent{false, {0}});
    mg.moves.comps.push_back(MoveComponent{true, {}});
    mg.lambda0 = OutcomeTag::all_plus(2);
    mg.start_positions = {0, 0};
    int zz = mg.intern_observable("ZZ");
    mg.initial_state = mg.intern_state("q0");
    mg.final_state = mg.intern_state("qf");
    for (int i = 0; i < 4; i++)
        mg.set_transition(mg.initial_state, OutcomeTag::from_index(i, 2),
                          Transition{mg.final_state, zz, {0, 5}});
    auto vg = validate_model(mg, ResourceModel::get('G'));
    bool movement = false;
    for (const auto& v : vg) movement |= v.find("not in D_G") != std::string::npos;
    CHECK(movement);

    // A model-G machine also sits inside model F's resources.
    mg.delta.clear();
    for (int i = 0; i < 4; i++)
        mg.set_transition(mg.initial_state, OutcomeTag::from_index(i, 2),
                          Transition{mg.final_state, zz, {0, 1}});
    mg.moves.comps[1] = MoveComponent{false, {-1, 0, 1}};
    CHECK(validate_model(mg, ResourceModel::get('G')).empty());
    CHECK(validate_model(mg, ResourceModel::get('F')).empty());
}

TEST_CASE("random product init is a deterministic function of the cell") {
    InitConfig cfg;
    cfg.mode = InitConfig::Mode::random_product;
    cfg.seed = 42;
    QubitInit a = cfg.state_for(CellId{1, 7});
    QubitInit b = cfg.state_for(CellId{1, 7});
    CHECK(a.a0 == b.a0);
    CHECK(a.a1 == b.a1);
    QubitInit c = cfg.state_for(CellId{1, 8});
    CHECK((c.a0 != a.a0 || c.a1 != a.a1));
}

TEST_CASE("branch probabilities over a full enumeration sum to one with pruning reported") {
    // Chain of 6 X measurements on fresh cells: 64 equally likely branches.
    MachineDefinition m = one_shot("X");
    m.delta.clear();
    int x = m.intern_observable("X");
    std::vector<int> chain;
    for (int i = 0; i < 6; i++) chain.push_back(m.intern_state("c" + std::to_string(i)));
    chain.push_back(m.final_state);
    m.initial_state = chain[0];
    for (int i = 0; i < 6; i++)
        for (int t = 0; t < 2; t++)
            m.set_transition(chain[i], OutcomeTag::from_index(t, 1),
                             Transition{chain[i + 1], x, {1}});
    BranchOptions bo;
    bo.max_steps = 10;
    BranchTree tree = branch_tree(m, RegisterState(), bo);
    CHECK(tree.branches.size() == 64);
    CHECK(tree.total_mass() == doctest::Approx(1.0).epsilon(1e-9));

    bo.prune_threshold = 0.1;  // prune everything (each branch is 1/64)
    BranchTree pruned = branch_tree(m, RegisterState(), bo);
    CHECK(pruned.branches.size() < 64);
    CHECK(pruned.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pruned.pruned_mass > 0.9);
}

TEST_CASE("sampled runs agree with the exhaustive enumeration on random machines") {
    for (std::uint64_t seed = 1; seed <= 5; seed++) {
        // random single-head machine over X/Z with occasional no-ops
        SplitMix64 gen(seed * 333);
        MachineDefinition m;
        m.tapes = {TapeSpec{}};
        m.head_tape = {0};
        m.moves = MoveSet::explicit1({-1, 0, 1});
        m.lambda0 = OutcomeTag::all_plus(1);
        m.start_positions = {0};
        const char* names[] = {"X", "Z", "I"};
        int n_states = 3;
        for (int i = 0; i < n_states; i++) m.intern_state("s" + std::to_string(i));
        m.initial_state = 0;
        m.final_state = m.intern_state("qf");
        for (int q = 0; q < n_states; q++)
            for (int t = 0; t < 2; t++) {
                Transition tr;
                tr.next_state = gen.next() % 3 == 0 ? m.final_state
                                                    : static_cast<int>(gen.next() % n_states);
                tr.observable = m.intern_observable(names[gen.next() % 3]);
                tr.move = {static_cast<std::int64_t>(gen.next() % 3) - 1};
                m.set_transition(q, OutcomeTag::from_index(t, 1), tr);
            }

        RegisterState input = random_product_state({CellId{0, 0}, CellId{0, 1}}, seed * 7);
        BranchOptions bo;
        bo.max_steps = 12;
        std::map<std::string, double> exact;
        double mass = branch_tree_visit(m, input, bo, [&](Branch&& b) {
            exact[(b.result.halted ? "H" : "R") + trace_signature(b.result.trace)] +=
                b.probability;
        });
        (void)mass;

        const std::int64_t n = 3000;
        std::map<std::string, std::int64_t> counts;
        RunOptions opts;
        opts.max_steps = 12;
        for (std::int64_t i = 0; i < n; i++) {
            opts.seed = trial_seed(seed, i);
            RunResult r = run(m, input, opts);
            counts[(r.halted ? "H" : "R") + trace_signature(r.trace)]++;
        }
        for (const auto& [key, p] : exact) {
            double f = counts.count(key)
                           ? static_cast<double>(counts.at(key)) / static_cast<double>(n)
                           : 0.0;
            double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
            CHECK_MESSAGE(std::abs(f - p) <= 5 * sigma + 1e-3,
                          "machine " << seed << " branch " << key << ": " << f << " vs " << p);
        }
    }
}
