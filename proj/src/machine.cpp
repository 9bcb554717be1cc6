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

#include "mqtm/machine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace mqtm {

namespace {
constexpr double kBranchSumTolerance = 1e-6;

inline bool observable_is_noop(const Observable& obs) {
    return obs.plan_ready ? obs.plan_noop : obs.is_noop();
}
}

bool MoveComponent::contains(std::int64_t d) const {
    if (any) return true;
    return std::find(allowed.begin(), allowed.end(), d) != allowed.end();
}

bool MoveComponent::subset_of(const MoveComponent& o) const {
    if (o.any) return true;
    if (any) return false;
    for (std::int64_t d : allowed)
        if (!o.contains(d)) return false;
    return true;
}

std::string MoveComponent::str() const {
    if (any) return "Z";
    std::string s = "{";
    for (std::size_t i = 0; i < allowed.size(); i++) {
        if (i) s += ",";
        s += std::to_string(allowed[i]);
    }
    return s + "}";
}

bool MoveSet::contains(const std::vector<std::int64_t>& d) const {
    if (d.size() != comps.size()) return false;
    for (std::size_t i = 0; i < comps.size(); i++)
        if (!comps[i].contains(d[i])) return false;
    return true;
}

bool MoveSet::subset_of(const MoveSet& o) const {
    if (comps.size() != o.comps.size()) return false;
    for (std::size_t i = 0; i < comps.size(); i++)
        if (!comps[i].subset_of(o.comps[i])) return false;
    return true;
}

std::string MoveSet::str() const {
    std::string s;
    for (std::size_t i = 0; i < comps.size(); i++) {
        if (i) s += "x";
        s += comps[i].str();
    }
    return s;
}

MoveSet MoveSet::all(int k) {
    MoveSet m;
    m.comps.assign(k, MoveComponent{true, {}});
    return m;
}

MoveSet MoveSet::explicit1(std::vector<std::int64_t> v) {
    MoveSet m;
    m.comps.push_back(MoveComponent{false, std::move(v)});
    return m;
}

int MachineDefinition::state_id(const std::string& name) const {
    for (std::size_t i = 0; i < state_names.size(); i++)
        if (state_names[i] == name) return static_cast<int>(i);
    throw std::invalid_argument("unknown state: " + name);
}

int MachineDefinition::intern_state(const std::string& name) {
    for (std::size_t i = 0; i < state_names.size(); i++)
        if (state_names[i] == name) return static_cast<int>(i);
    state_names.push_back(name);
    return static_cast<int>(state_names.size() - 1);
}

int MachineDefinition::intern_observable(const Observable& obs) {
    auto it = observable_index.find(obs.name);
    if (it != observable_index.end()) return it->second;
    observables.push_back(obs);
    int id = static_cast<int>(observables.size() - 1);
    observable_index[obs.name] = id;
    return id;
}

int MachineDefinition::intern_observable(const std::string& spelling) {
    auto it = observable_index.find(spelling);
    if (it != observable_index.end()) return it->second;
    return intern_observable(named_observable(spelling));
}

const Transition& MachineDefinition::transition(int state, const OutcomeTag& tag) const {
    auto it = delta.find({state, tag.index()});
    if (it == delta.end())
        throw std::runtime_error("no transition defined for (" + state_names[state] + ", " +
                                 tag.str() + ")");
    return it->second;
}

void MachineDefinition::set_transition(int state, const OutcomeTag& tag, Transition t) {
    delta[{state, tag.index()}] = std::move(t);
}

std::vector<std::string> MachineDefinition::check_definition() const {
    std::vector<std::string> out;
    const int k = head_count();
    if (state_names.empty()) out.push_back("machine has no states");
    if (initial_state == final_state) out.push_back("initial and final states must differ");
    if (tapes.empty()) out.push_back("machine has no tapes");
    if (k == 0) out.push_back("machine has no heads");
    if (k > 2) out.push_back("at most two measurement heads are supported");
    for (int h = 0; h < k; h++)
        if (head_tape[h] < 0 || head_tape[h] >= static_cast<int>(tapes.size()))
            out.push_back("head " + std::to_string(h) + " assigned to missing tape");
    if (static_cast<int>(moves.comps.size()) != k)
        out.push_back("movement set arity differs from head count");
    if (lambda0.k != k) out.push_back("lambda0 arity differs from head count");
    if (static_cast<int>(start_positions.size()) != k)
        out.push_back("start positions arity differs from head count");
    else
        for (int h = 0; h < k; h++)
            if (head_tape[h] >= 0 && head_tape[h] < static_cast<int>(tapes.size()) &&
                !tapes[head_tape[h]].in_bounds(start_positions[h]))
                out.push_back("head " + std::to_string(h) + " starts off its tape");
    if (output_head < 0 || output_head >= k) out.push_back("output head out of range");
    if (input_tape < 0 || input_tape >= static_cast<int>(tapes.size()))
        out.push_back("input tape out of range");

    for (const auto& [key, t] : delta) {
        const auto& [state, tag_index] = key;
        auto where = [&]() {
            return "transition from (" +
                   (state < static_cast<int>(state_names.size()) ? state_names[state] : "?") +
                   ", " + OutcomeTag::from_index(tag_index, k).str() + ")";
        };
        if (state == final_state) out.push_back(where() + ": transitions out of the final state");
        if (t.next_state < 0 || t.next_state >= static_cast<int>(state_names.size()))
            out.push_back(where() + ": target state out of range");
        if (t.observable < 0 || t.observable >= static_cast<int>(observables.size())) {
            out.push_back(where() + ": observable out of range");
            continue;
        }
        const Observable& obs = observables[t.observable];
        if (obs.arity != k)
            out.push_back(where() + ": observable " + obs.name + " arity " +
                          std::to_string(obs.arity) + " differs from head count " +
                          std::to_string(k));
        if (static_cast<int>(t.move.size()) != k)
            out.push_back(where() + ": movement arity differs from head count");
        else if (!moves.contains(t.move))
            out.push_back(where() + ": movement not in the declared movement set");
    }
    return out;
}

QubitInit InitConfig::state_for(CellId cell) const {
    if (mode == Mode::zero) return QubitInit::zero();
    std::uint64_t h = mix64(seed ^ 0x6D5F4C3B2A190807ULL,
                            mix64(static_cast<std::uint64_t>(cell.tape) + 1,
                                  static_cast<std::uint64_t>(cell.index) ^ 0x5BF0A8B1ULL));
    SplitMix64 rng(h);
    return QubitInit::random(rng);
}

namespace {

struct BranchEval {
    double probability = 0;
    std::optional<RegisterState> state;
    OutcomeTag tag;
};

// Materializes the cells the observable acts on, then evaluates each
// spectral branch. For A (x) I / I (x) B shapes only the acting factor's
// cell is touched, which keeps registers from growing on identity slots.
struct PreparedMeasurement {
    std::vector<CellId> targets;
    const std::vector<ObservableBranch>* branches = nullptr;  // matched to obs branch order
    std::vector<ObservableBranch> owned;  // backing store for uncached observables
};

PreparedMeasurement prepare(Configuration& config, const MachineDefinition& m,
                            const Observable& obs, const RunOptions& opts) {
    PreparedMeasurement prep;
    const int k = m.head_count();
    if (obs.arity != k)
        throw std::invalid_argument("observable " + obs.name + " arity does not match head count");

    if (k == 2 && config.head_cell(m, 0) == config.head_cell(m, 1))
        throw std::runtime_error("overlapping heads: both heads on cell " +
                                 config.head_cell(m, 0).str() + " for a 2-qubit measurement (" +
                                 obs.name + ")");

    if (obs.plan_ready) {
        if (obs.plan_factor) {
            prep.targets = {config.head_cell(m, obs.plan_factor->slot)};
            prep.branches = &obs.plan_factor->branches;
        } else {
            for (int h = 0; h < k; h++) prep.targets.push_back(config.head_cell(m, h));
            prep.branches = &obs.branches;
        }
    } else if (auto sf = obs.single_factor()) {
        prep.targets = {config.head_cell(m, sf->slot)};
        Observable reduced = spectral_decompose(sf->op, obs.name + "[factor]");
        if (reduced.branches.size() != obs.branches.size())
            throw std::runtime_error("internal: factor decomposition branch mismatch for " +
                                     obs.name);
        prep.owned = std::move(reduced.branches);
        prep.branches = &prep.owned;
    } else {
        for (int h = 0; h < k; h++) prep.targets.push_back(config.head_cell(m, h));
        prep.branches = &obs.branches;
    }

    std::vector<CellId> fresh;
    for (const CellId& c : prep.targets) {
        if (!m.tapes[c.tape].in_bounds(c.index))
            throw std::runtime_error("head points off tape at " + c.str());
        if (!config.state.has_cell(c)) fresh.push_back(c);
    }
    if (!fresh.empty()) {
        std::vector<QubitInit> inits;
        inits.reserve(fresh.size());
        for (const CellId& c : fresh) inits.push_back(opts.init.state_for(c));
        config.state = config.state.extend(fresh, inits, opts.max_qubits);
    }
    return prep;
}

std::vector<BranchEval> evaluate_branches(const Configuration& config, const MachineDefinition& m,
                                          const Observable& obs, const PreparedMeasurement& prep) {
    std::vector<BranchEval> evals;
    double total = 0;
    const auto& branches = *prep.branches;
    for (std::size_t b = 0; b < branches.size(); b++) {
        auto [p, post] = config.state.project(branches[b].projector, prep.targets);
        total += p;
        evals.push_back(BranchEval{p, std::move(post),
                                   obs.tag_for_branch(static_cast<int>(b), m.head_count())});
    }
    if (std::abs(total - 1.0) > kBranchSumTolerance)
        throw std::runtime_error("measurement branch probabilities sum to " +
                                 std::to_string(total) + " for " + obs.name);
    return evals;
}

void move_heads(Configuration& config, const MachineDefinition& m, const Transition& t) {
    if (!m.moves.contains(t.move)) {
        std::string s = "(";
        for (std::size_t i = 0; i < t.move.size(); i++)
            s += (i ? "," : "") + std::to_string(t.move[i]);
        throw std::runtime_error("movement " + s + ") not in the machine movement set " +
                                 m.moves.str());
    }
    for (int h = 0; h < m.head_count(); h++) {
        std::int64_t np = config.heads[h] + t.move[h];
        if (!m.tapes[m.head_tape[h]].in_bounds(np))
            throw std::runtime_error("head " + std::to_string(h) + " moved off tape " +
                                     std::to_string(m.head_tape[h]) + " to position " +
                                     std::to_string(np));
        config.heads[h] = np;
    }
}

}  // namespace

MeasureOutcome measure(Configuration& config, const MachineDefinition& m, const Observable& obs,
                       SplitMix64& rng, const RunOptions& opts) {
    PreparedMeasurement prep = prepare(config, m, obs, opts);
    std::vector<BranchEval> evals = evaluate_branches(config, m, obs, prep);

    double total = 0;
    for (const auto& e : evals) total += e.probability;
    const double u = rng.next_double() * total;
    double cum = 0;
    for (auto& e : evals) {
        cum += e.probability;
        if (u < cum || &e == &evals.back()) {
            if (!e.state) throw std::runtime_error("sampled a zero-probability branch of " + obs.name);
            config.state = std::move(*e.state);
            config.last_outcome = e.tag;
            return MeasureOutcome{e.tag, e.probability / total};
        }
    }
    throw std::runtime_error("measurement sampling failed for " + obs.name);
}

TraceStep step(Configuration& config, const MachineDefinition& m, SplitMix64& rng,
               const RunOptions& opts) {
    if (config.classical_state == m.final_state)
        throw std::runtime_error("step on a halted machine");
    const Transition& t = m.transition(config.classical_state, config.last_outcome);
    const Observable& obs = m.observables[t.observable];

    TraceStep ts;
    ts.state_before = config.classical_state;
    ts.observable = t.observable;
    ts.heads = config.heads;

    if (observable_is_noop(obs)) {
        ts.measured = false;
        ts.outcome = config.last_outcome;
        ts.branch_probability = 1.0;
    } else {
        MeasureOutcome mo = measure(config, m, obs, rng, opts);
        ts.outcome = mo.tag;
        ts.branch_probability = mo.probability;
    }
    config.classical_state = t.next_state;
    ts.state_after = t.next_state;
    move_heads(config, m, t);
    config.step_count++;
    return ts;
}

RegisterState make_input(const MachineDefinition& m, const std::vector<cplx>& amplitudes) {
    if (amplitudes.empty() || amplitudes.size() == 1) return RegisterState();
    std::size_t n = 0;
    while ((std::size_t{1} << n) < amplitudes.size()) n++;
    if ((std::size_t{1} << n) != amplitudes.size())
        throw std::invalid_argument("input amplitude count must be a power of two");
    std::vector<CellId> cells;
    for (std::size_t i = 0; i < n; i++)
        cells.push_back(CellId{m.input_tape, m.input_origin + static_cast<std::int64_t>(i)});
    return RegisterState::from_amplitudes(std::move(cells), amplitudes);
}

RegisterState make_basis_input(const MachineDefinition& m, const std::string& bits) {
    if (bits.empty()) return RegisterState();
    std::vector<cplx> amps(std::size_t{1} << bits.size(), cplx(0, 0));
    std::size_t idx = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') throw std::invalid_argument("basis string must be over {0,1}");
        idx = (idx << 1) | static_cast<std::size_t>(c - '0');
    }
    amps[idx] = 1.0;
    return make_input(m, amps);
}

Configuration initial_configuration(const MachineDefinition& m, const RegisterState& input) {
    for (const CellId& c : input.cells()) {
        if (c.tape != m.input_tape)
            throw std::invalid_argument("input cell " + c.str() + " is not on the input tape");
        if (!m.tapes[c.tape].in_bounds(c.index))
            throw std::invalid_argument("input cell " + c.str() + " is off the tape");
    }
    Configuration config;
    config.state = input;
    config.heads = m.start_positions;
    config.last_outcome = m.lambda0;
    config.classical_state = m.initial_state;
    return config;
}

std::vector<CellId> output_cells(const MachineDefinition& m, const Configuration& final_config) {
    std::vector<CellId> out;
    const int tape = m.head_tape[m.output_head];
    const std::int64_t base = final_config.heads[m.output_head];
    for (int i = 0; i < m.output_width; i++) {
        CellId c{tape, base + i};
        if (m.tapes[tape].in_bounds(c.index)) out.push_back(c);
    }
    return out;
}

RunResult run(const MachineDefinition& m, const RegisterState& input, const RunOptions& opts) {
    auto problems = m.check_definition();
    if (!problems.empty()) {
        std::string msg = "machine definition is invalid:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw std::invalid_argument(msg);
    }
    Configuration config = initial_configuration(m, input);
    SplitMix64 rng(opts.seed);
    RunResult result;
    while (config.classical_state != m.final_state && config.step_count < opts.max_steps)
        result.trace.push_back(step(config, m, rng, opts));
    result.halted = config.classical_state == m.final_state;
    result.output_cells = output_cells(m, config);
    result.final_config = std::move(config);
    return result;
}

double BranchTree::total_mass() const {
    double t = pruned_mass;
    for (const auto& b : branches) t += b.probability;
    return t;
}

double BranchTree::halted_mass() const {
    double t = 0;
    for (const auto& b : branches)
        if (b.result.halted) t += b.probability;
    return t;
}

double branch_tree_visit(const MachineDefinition& m, const RegisterState& input,
                         const BranchOptions& opts,
                         const std::function<void(Branch&&)>& leaf) {
    auto problems = m.check_definition();
    if (!problems.empty()) {
        std::string msg = "machine definition is invalid:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw std::invalid_argument(msg);
    }
    RunOptions ropts;
    ropts.max_qubits = opts.max_qubits;
    ropts.init = opts.init;

    double pruned_mass = 0;
    std::uint64_t leaves = 0;
    std::vector<TraceStep> trace;
    std::vector<char> counted_state(m.state_names.size(), 0);
    for (int st : opts.counted_states)
        if (st >= 0 && st < static_cast<int>(counted_state.size())) counted_state[st] = 1;

    std::function<void(Configuration&&, double, std::int64_t)> descend =
        [&](Configuration&& config, double prob, std::int64_t counted) {
        // The counted cut fires only when the next step would again come from
        // a counted state, so uncounted glue steps in flight still finish.
        if (config.classical_state == m.final_state || config.step_count >= opts.max_steps ||
            (opts.counted_limit >= 0 && counted >= opts.counted_limit &&
             counted_state[config.classical_state])) {
            if (++leaves > opts.branch_cap)
                throw std::runtime_error("branch cap exceeded (" +
                                         std::to_string(opts.branch_cap) + " branches)");
            Branch b;
            b.probability = prob;
            b.result.halted = config.classical_state == m.final_state;
            b.result.trace = trace;
            b.result.output_cells = output_cells(m, config);
            b.result.final_config = std::move(config);
            leaf(std::move(b));
            return;
        }

        const Transition& t = m.transition(config.classical_state, config.last_outcome);
        const Observable& obs = m.observables[t.observable];
        const std::int64_t counted_next =
            counted + (counted_state[config.classical_state] ? 1 : 0);

        if (observable_is_noop(obs)) {
            TraceStep ts;
            ts.state_before = config.classical_state;
            ts.observable = t.observable;
            ts.heads = config.heads;
            ts.outcome = config.last_outcome;
            ts.measured = false;
            ts.state_after = t.next_state;
            config.classical_state = t.next_state;
            move_heads(config, m, t);
            config.step_count++;
            trace.push_back(ts);
            descend(std::move(config), prob, counted_next);
            trace.pop_back();
            return;
        }

        PreparedMeasurement prep = prepare(config, m, obs, ropts);
        std::vector<BranchEval> evals = evaluate_branches(config, m, obs, prep);
        for (auto& e : evals) {
            if (!e.state) continue;
            double child_prob = prob * e.probability;
            if (child_prob < opts.prune_threshold) {
                pruned_mass += child_prob;
                continue;
            }
            Configuration child;
            child.state = std::move(*e.state);
            child.heads = config.heads;
            child.last_outcome = e.tag;
            child.classical_state = t.next_state;
            child.step_count = config.step_count;

            TraceStep ts;
            ts.state_before = config.classical_state;
            ts.observable = t.observable;
            ts.heads = config.heads;
            ts.outcome = e.tag;
            ts.branch_probability = e.probability;
            ts.state_after = t.next_state;

            move_heads(child, m, t);
            child.step_count++;
            trace.push_back(ts);
            descend(std::move(child), child_prob, counted_next);
            trace.pop_back();
        }
    };

    descend(initial_configuration(m, input), 1.0, 0);
    return pruned_mass;
}

BranchTree branch_tree(const MachineDefinition& m, const RegisterState& input,
                       const BranchOptions& opts) {
    BranchTree tree;
    tree.pruned_mass = branch_tree_visit(
        m, input, opts, [&](Branch&& b) { tree.branches.push_back(std::move(b)); });
    return tree;
}

const ResourceModel& ResourceModel::get(char name) {
    static const std::map<char, ResourceModel> models = [] {
        std::map<char, ResourceModel> t;
        auto obs_names = [](char c) {
            std::vector<std::string> names;
            for (const auto& o : named_set(c).members) names.push_back(o.name);
            return names;
        };
        TapeSpec inf{};
        // A: one infinite tape, two heads, unrestricted movement.
        t['A'] = ResourceModel{'A', {inf}, {0, 0}, MoveSet::all(2), false, false, obs_names('A')};
        // B: one infinite tape, one head, any movements, any 1-qubit observables.
        t['B'] = ResourceModel{'B', {inf}, {0}, MoveSet::all(1), true, true, {}};
        // C: one infinite tape, one head, steps in {-1,0,+1}, observables {X, Z}.
        t['C'] = ResourceModel{'C', {inf}, {0}, MoveSet::explicit1({-1, 0, 1}), false, false,
                               obs_names('C')};
        // D: two infinite tapes, one head per tape, unrestricted movement.
        t['D'] = ResourceModel{'D', {inf, inf}, {0, 1}, MoveSet::all(2), false, false,
                               obs_names('D')};
        // E: two-qubit tape plus infinite tape.
        MoveSet de;
        de.comps.push_back(MoveComponent{false, {-1, 0, 1}});
        de.comps.push_back(MoveComponent{true, {}});
        t['E'] = ResourceModel{'E', {TapeSpec{2}, inf}, {0, 1}, de, false, false, obs_names('E')};
        // F: one-qubit tape plus infinite tape, finite head parked.
        MoveSet df;
        df.comps.push_back(MoveComponent{false, {0}});
        df.comps.push_back(MoveComponent{true, {}});
        t['F'] = ResourceModel{'F', {TapeSpec{1}, inf}, {0, 1}, df, false, false, obs_names('F')};
        // G: like F with unit moves only.
        MoveSet dg;
        dg.comps.push_back(MoveComponent{false, {0}});
        dg.comps.push_back(MoveComponent{false, {-1, 0, 1}});
        t['G'] = ResourceModel{'G', {TapeSpec{1}, inf}, {0, 1}, dg, false, false, obs_names('G')};
        return t;
    }();
    auto it = models.find(name);
    if (it == models.end())
        throw std::invalid_argument(std::string("unknown resource model: M_") + name);
    return it->second;
}

std::vector<std::string> validate_model(const MachineDefinition& m, const ResourceModel& model) {
    std::vector<std::string> out;
    if (m.head_count() != static_cast<int>(model.head_tape.size()))
        out.push_back("head count " + std::to_string(m.head_count()) + " differs from model M_" +
                      std::string(1, model.name) + " (" +
                      std::to_string(model.head_tape.size()) + ")");
    if (m.tapes.size() != model.tapes.size())
        out.push_back("tape count " + std::to_string(m.tapes.size()) + " differs from model (" +
                      std::to_string(model.tapes.size()) + ")");
    else {
        for (std::size_t i = 0; i < m.tapes.size(); i++) {
            if (model.tapes[i].infinite()) continue;
            if (m.tapes[i].infinite() || *m.tapes[i].length > *model.tapes[i].length)
                out.push_back("tape " + std::to_string(i) + " (" + m.tapes[i].str() +
                              ") exceeds the model's " + model.tapes[i].str() + "-cell tape");
        }
    }
    if (m.head_count() == static_cast<int>(model.head_tape.size()) &&
        m.tapes.size() == model.tapes.size()) {
        for (int h = 0; h < m.head_count(); h++)
            if (m.head_tape[h] != model.head_tape[h])
                out.push_back("head " + std::to_string(h) + " sits on tape " +
                              std::to_string(m.head_tape[h]) + ", model expects tape " +
                              std::to_string(model.head_tape[h]));
    }

    std::vector<bool> obs_seen(m.observables.size(), false);
    for (const auto& [key, t] : m.delta) {
        (void)key;
        if (t.observable >= 0 && t.observable < static_cast<int>(m.observables.size()))
            obs_seen[t.observable] = true;
        if (!model.any_moves && static_cast<int>(t.move.size()) == static_cast<int>(model.head_tape.size()) &&
            !model.moves.contains(t.move)) {
            std::string s = "(";
            for (std::size_t i = 0; i < t.move.size(); i++)
                s += (i ? "," : "") + std::to_string(t.move[i]);
            s += ")";
            std::string msg = "movement " + s + " not in D_" + std::string(1, model.name);
            if (std::find(out.begin(), out.end(), msg) == out.end()) out.push_back(msg);
        }
    }
    for (std::size_t i = 0; i < m.observables.size(); i++) {
        if (!obs_seen[i]) continue;
        const Observable& obs = m.observables[i];
        if (obs.is_noop()) continue;  // no measurement is done
        if (model.any_single_qubit_obs) {
            if (obs.arity != 1)
                out.push_back("observable arity violation: " + obs.name + " acts on " +
                              std::to_string(obs.arity) + " qubits, M_" +
                              std::string(1, model.name) + " allows 1-qubit observables only");
            continue;
        }
        if (std::find(model.allowed_obs.begin(), model.allowed_obs.end(), obs.name) ==
            model.allowed_obs.end())
            out.push_back("observable " + obs.name + " not in O_" + std::string(1, model.name));
    }
    return out;
}

}  // namespace mqtm
