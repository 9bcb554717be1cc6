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

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mqtm/cell.hpp"
#include "mqtm/observable.hpp"
#include "mqtm/state.hpp"

namespace mqtm {

/// Tape geometry. A finite tape has cells 0..length-1; an infinite tape is
/// sparse and cells materialize in the register on first measurement.
struct TapeSpec {
    std::optional<std::int64_t> length;  // nullopt = unbounded

    bool infinite() const { return !length.has_value(); }
    bool in_bounds(std::int64_t idx) const {
        return infinite() || (idx >= 0 && idx < *length);
    }
    std::string str() const { return infinite() ? "inf" : std::to_string(*length); }
};

/// Allowed head displacements, one component per head. A component is either
/// all of the integers or an explicit finite set.
struct MoveComponent {
    bool any = false;
    std::vector<std::int64_t> allowed;

    bool contains(std::int64_t d) const;
    bool subset_of(const MoveComponent& o) const;
    std::string str() const;
};

struct MoveSet {
    std::vector<MoveComponent> comps;

    bool contains(const std::vector<std::int64_t>& d) const;
    bool subset_of(const MoveSet& o) const;
    std::string str() const;

    static MoveSet all(int k);
    static MoveSet explicit1(std::vector<std::int64_t> v);
};

struct Transition {
    int next_state = 0;
    int observable = 0;  // index into MachineDefinition::observables
    std::vector<std::int64_t> move;
};

/// Classical finite control over measurements of quantum tapes: states,
/// outcome alphabet {-1,+1}^k, an observable table and the transition map
/// delta : (state, outcome) -> (state, observable, head movement).
/// The table may be partial; stepping onto an undefined pair is a runtime
/// error rather than a construction error.
struct MachineDefinition {
    std::vector<std::string> state_names;
    int initial_state = 0;
    int final_state = 0;

    std::vector<TapeSpec> tapes;
    std::vector<int> head_tape;  // head i sits on tape head_tape[i]
    MoveSet moves;

    std::vector<Observable> observables;
    std::map<std::string, int> observable_index;

    // delta[(state, tag index)] -> transition
    std::map<std::pair<int, int>, Transition> delta;

    OutcomeTag lambda0 = OutcomeTag::all_plus(1);

    int input_tape = 0;
    std::int64_t input_origin = 0;
    std::vector<std::int64_t> start_positions;
    int output_head = 0;
    int output_width = 1;

    int head_count() const { return static_cast<int>(head_tape.size()); }
    int state_id(const std::string& name) const;
    int intern_state(const std::string& name);
    int intern_observable(const Observable& obs);
    int intern_observable(const std::string& spelling);
    bool has_transition(int state, const OutcomeTag& tag) const {
        return delta.count({state, tag.index()}) > 0;
    }
    const Transition& transition(int state, const OutcomeTag& tag) const;
    void set_transition(int state, const OutcomeTag& tag, Transition t);

    /// Structural problems (empty when well formed). run() refuses machines
    /// with a nonempty report.
    std::vector<std::string> check_definition() const;
};

/// Complete instantaneous description of a computation.
struct Configuration {
    RegisterState state;
    std::vector<std::int64_t> heads;
    OutcomeTag last_outcome;
    int classical_state = 0;
    std::int64_t step_count = 0;

    CellId head_cell(const MachineDefinition& m, int head) const {
        return CellId{m.head_tape[head], heads[head]};
    }
};

/// Fresh-cell initialization: |0> by default, or a per-cell deterministic
/// random product state derived from a seed (used by robustness tests).
struct InitConfig {
    enum class Mode { zero, random_product } mode = Mode::zero;
    std::uint64_t seed = 0;

    QubitInit state_for(CellId cell) const;
};

struct RunOptions {
    std::uint64_t seed = 0;
    std::int64_t max_steps = 10000;
    int max_qubits = kDefaultMaxQubits;
    InitConfig init;
};

struct TraceStep {
    int state_before = 0;
    int state_after = 0;
    int observable = 0;
    std::vector<std::int64_t> heads;  // positions when the observable fired
    OutcomeTag outcome;
    double branch_probability = 1.0;
    bool measured = true;  // false for the no-op observables
};

struct RunResult {
    bool halted = false;
    Configuration final_config;
    std::vector<TraceStep> trace;
    std::vector<CellId> output_cells;
};

/// One projective measurement on the cells under the heads; samples the
/// branch by cumulative probability in ascending eigenvalue order.
struct MeasureOutcome {
    OutcomeTag tag;
    double probability = 1.0;
};
MeasureOutcome measure(Configuration& config, const MachineDefinition& m,
                       const Observable& obs, SplitMix64& rng, const RunOptions& opts);

/// One transition: look up delta, measure (skipping the no-op observables,
/// which leave the last outcome untouched), switch state, move the heads.
TraceStep step(Configuration& config, const MachineDefinition& m, SplitMix64& rng,
               const RunOptions& opts);

/// Builds the input register on the machine's input tape.
RegisterState make_input(const MachineDefinition& m, const std::vector<cplx>& amplitudes);
RegisterState make_basis_input(const MachineDefinition& m, const std::string& bits);

Configuration initial_configuration(const MachineDefinition& m, const RegisterState& input);

RunResult run(const MachineDefinition& m, const RegisterState& input, const RunOptions& opts);

struct Branch {
    double probability = 0;
    RunResult result;
};

struct BranchOptions {
    std::int64_t max_steps = 100;
    std::uint64_t branch_cap = std::uint64_t{1} << 20;
    double prune_threshold = 1e-12;
    int max_qubits = kDefaultMaxQubits;
    InitConfig init;
    /// When set, enumeration also stops (leaf, not halted) once this many
    /// steps have fired from the listed states. Lowered machines use it to
    /// cut their trees at a source-step horizon.
    std::vector<int> counted_states;
    std::int64_t counted_limit = -1;
};

/// Exhaustive enumeration of every measurement-outcome path with its exact
/// probability. Probabilities over the returned branches plus pruned_mass
/// sum to 1 (within numerical tolerance).
struct BranchTree {
    std::vector<Branch> branches;
    double pruned_mass = 0;

    double total_mass() const;
    double halted_mass() const;
};
BranchTree branch_tree(const MachineDefinition& m, const RegisterState& input,
                       const BranchOptions& opts);

/// Streaming form: the callback sees each leaf once, in deterministic
/// (ascending-outcome depth-first) order, and nothing is retained. Returns
/// the pruned mass. Aggregating over large trees should use this.
double branch_tree_visit(const MachineDefinition& m, const RegisterState& input,
                         const BranchOptions& opts,
                         const std::function<void(Branch&&)>& leaf);

/// Resource profile of the models A..G: tape lengths, head placement,
/// movement set and observable table.
struct ResourceModel {
    char name = 'A';
    std::vector<TapeSpec> tapes;
    std::vector<int> head_tape;
    MoveSet moves;
    bool any_single_qubit_obs = false;   // model B: any 1-qubit observables
    bool any_moves = false;              // model B: any subset of Z
    std::vector<std::string> allowed_obs;

    static const ResourceModel& get(char name);
};

/// Violations of the model's resource constraints by the machine's used
/// resources (geometry, movements and observables appearing in delta).
/// The no-op observables I and II are always admitted.
std::vector<std::string> validate_model(const MachineDefinition& m, const ResourceModel& model);

/// Cells reported as output: output_width cells starting at the output
/// head's final position.
std::vector<CellId> output_cells(const MachineDefinition& m, const Configuration& final_config);

}  // namespace mqtm
