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

#include "mqtm/compiler.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mqtm/pauli.hpp"

namespace mqtm {

std::string LoweringReport::str() const {
    std::ostringstream os;
    os << "source_model: " << source_model << "\n";
    os << "target_model: " << target_model << "\n";
    os << "states_before: " << states_before << "\n";
    os << "states_after: " << states_after << "\n";
    os << "inserted_gadget_count: " << inserted_gadget_count << "\n";
    for (const auto& e : expansions)
        os << "transition " << e.state << " " << e.tag << ": kind=" << e.kind
           << " inserted_states=" << e.inserted_states << " rows=" << e.rows_emitted << "\n";
    return os.str();
}

namespace {

void throw_if_nonconformant(const MachineDefinition& m, char model, const char* what) {
    auto viol = validate_model(m, ResourceModel::get(model));
    if (viol.empty()) return;
    std::string msg = std::string(what) + ": input machine does not conform to M_" + model + ":";
    for (const auto& v : viol) msg += "\n  " + v;
    throw std::invalid_argument(msg);
}

/// Interns generated state names, keeping them distinct from everything
/// already present.
struct Namer {
    MachineDefinition& m;
    std::set<std::string> used;

    explicit Namer(MachineDefinition& mm) : m(mm) {
        for (const auto& s : m.state_names) used.insert(s);
    }
    int fresh(std::string base) {
        std::string name = base;
        int n = 0;
        while (used.count(name)) name = base + "." + std::to_string(++n);
        used.insert(name);
        return m.intern_state(name);
    }
};

void add_row(MachineDefinition& out, int from, std::optional<OutcomeTag> on, int to, int obs,
             std::vector<std::int64_t> move) {
    Transition t{to, obs, std::move(move)};
    const int k = out.head_count();
    if (on) {
        if (out.has_transition(from, *on))
            throw std::logic_error("lowering generated a duplicate row from " +
                                   out.state_names[from]);
        out.set_transition(from, *on, t);
        return;
    }
    for (int i = 0; i < (1 << k); i++) {
        OutcomeTag tag = OutcomeTag::from_index(i, k);
        if (out.has_transition(from, tag))
            throw std::logic_error("lowering generated a duplicate wildcard row from " +
                                   out.state_names[from]);
        out.set_transition(from, tag, t);
    }
}

std::string offset_str(std::int64_t w) {
    if (w == 0) return "z";
    return (w > 0 ? "p" : "m") + std::to_string(w > 0 ? w : -w);
}

Pauli fold_pauli(char kind, int outcome) {
    if (kind == 'x') return Pauli{outcome < 0, false};
    if (kind == 'z') return Pauli{false, outcome < 0};
    return Pauli{};
}

const Pauli kPaulis[4] = {Pauli{false, false}, Pauli{true, false}, Pauli{true, true},
                          Pauli{false, true}};

struct LoopStage {
    std::string obs;
    std::vector<std::int64_t> at;
    std::vector<std::int64_t> then;
    char fold;  // how this stage's outcome composes into the residual
};

/// Emits a cyclic residual-tracking pipeline: stage i's measurement is
/// performed by the state that consumed stage i-1's outcome. After the
/// outcome of stage `decide_after` folds to the identity residual, the
/// pipeline leaves for `exit_state` (heads repositioned to `exit_to`)
/// instead of starting the correction leg. Returns the wildcard entry state.
int emit_pauli_loop(MachineDefinition& out, Namer& namer, const std::string& prefix,
                    const std::vector<LoopStage>& cycle, int decide_after, int exit_state,
                    const std::vector<std::int64_t>& exit_to, int noop_obs) {
    const int n = static_cast<int>(cycle.size());
    for (int i = 0; i < n; i++) {
        const auto& prev = cycle[(i + n - 1) % n];
        if (cycle[i].at != prev.then)
            throw std::logic_error("loop schedule: stage " + std::to_string(i) +
                                   " does not start where stage " + std::to_string(i - 1) +
                                   " ended");
    }

    auto stage_state = [&](int i, Pauli f) {
        return prefix + "~p" + std::to_string(i) + std::string(1, f.letter());
    };
    std::vector<std::vector<int>> ids(n, std::vector<int>(4));
    for (int i = 0; i < n; i++)
        for (int fi = 0; fi < 4; fi++) ids[i][fi] = namer.fresh(stage_state(i, kPaulis[fi]));
    auto id_of = [&](int i, Pauli f) {
        for (int fi = 0; fi < 4; fi++)
            if (kPaulis[fi] == f) return ids[i][fi];
        throw std::logic_error("bad pauli");
    };

    std::vector<int> obs_id(n);
    for (int i = 0; i < n; i++) obs_id[i] = out.intern_observable(cycle[i].obs);

    auto move_between = [](const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
        std::vector<std::int64_t> mv(a.size());
        for (std::size_t j = 0; j < a.size(); j++) mv[j] = b[j] - a[j];
        return mv;
    };

    int entry = namer.fresh(prefix + "~e");
    add_row(out, entry, std::nullopt, id_of(1 % n, Pauli{}), obs_id[0],
            move_between(cycle[0].at, cycle[0].then));

    const int decide_state = (decide_after + 1) % n;
    for (int i = 0; i < n; i++) {
        const auto& prev = cycle[(i + n - 1) % n];
        for (Pauli f : kPaulis) {
            for (int o : {+1, -1}) {
                Pauli g = f * fold_pauli(prev.fold, o);
                OutcomeTag tag = OutcomeTag::scalar(o, out.head_count());
                if (i == decide_state && g.is_identity()) {
                    add_row(out, id_of(i, f), tag, exit_state, noop_obs,
                            move_between(cycle[i].at, exit_to));
                } else {
                    add_row(out, id_of(i, f), tag, id_of((i + 1) % n, g), obs_id[i],
                            move_between(cycle[i].at, cycle[i].then));
                }
            }
        }
    }
    return entry;
}

/// Six-stage state-transfer cycle at fixed head positions. `to_finite`
/// picks which side is the destination: the finite cell under head 0, or
/// the infinite cell under head 1.
std::vector<LoopStage> transfer_cycle(bool to_finite, const std::vector<std::int64_t>& at) {
    std::string zdest = to_finite ? "ZI" : "IZ";
    std::string zsrc = to_finite ? "IZ" : "ZI";
    return {
        {zdest, at, at, 'x'}, {"XX", at, at, 'z'}, {zsrc, at, at, 'x'},
        {zsrc, at, at, 'x'},  {"XX", at, at, 'z'}, {zdest, at, at, 'x'},
    };
}

/// Sixteen-stage teleport cycle for the two-cell finite tape: Bell pair on
/// the finite cells a,b via the infinite auxiliary next to the source, Bell
/// measurement, and the bounce leg teleporting the state back for another
/// attempt. `to_finite` selects whether the wanted landing is the finite
/// cell a or the infinite cell s.
std::vector<LoopStage> teleport_cycle(bool to_finite, std::int64_t s) {
    const std::int64_t c = s + 1;
    // Teleport infinite cell s onto finite cell a: Bell pair on (a,b) via
    // the auxiliary cell next to the source, then the Bell measurement.
    std::vector<LoopStage> in_att = {
        {"ZI", {0, s}, {1, s}, 'x'},  // Z(a)
        {"ZI", {1, s}, {1, c}, 'x'},  // Z(b)
        {"IZ", {1, c}, {0, c}, 'x'},  // Z(aux)
        {"XX", {0, c}, {1, c}, 'z'},  // XX(aux, a)
        {"XX", {1, c}, {1, c}, 'z'},  // XX(aux, b)
        {"IZ", {1, c}, {1, s}, 'x'},  // Z(aux)
        {"ZZ", {1, s}, {1, s}, 'x'},  // Bell measurement on (s, b)
        {"XX", {1, s}, {1, s}, 'z'},
    };
    // Teleport finite cell a onto infinite cell s: Bell pair on (s, c) via
    // the finite helper b, Bell measurement on (a, c).
    std::vector<LoopStage> out_att = {
        {"IZ", {0, s}, {0, c}, 'x'},  // Z(s)
        {"IZ", {0, c}, {1, c}, 'x'},  // Z(c)
        {"ZI", {1, c}, {1, s}, 'x'},  // Z(b)
        {"XX", {1, s}, {1, c}, 'z'},  // XX(b, s)
        {"XX", {1, c}, {1, c}, 'z'},  // XX(b, c)
        {"ZI", {1, c}, {0, c}, 'x'},  // Z(b)
        {"ZZ", {0, c}, {0, c}, 'x'},  // Bell measurement on (a, c)
        {"XX", {0, c}, {0, s}, 'z'},
    };
    std::vector<LoopStage> cycle;
    if (to_finite) {
        cycle = in_att;
        std::vector<LoopStage> bounce = out_att;  // send a's state back to s
        bounce[0].at = {1, s};
        bounce[0].then = {1, c};
        bounce[1].at = {1, c};
        bounce[7].then = {0, s};  // wrap into the next inward attempt
        cycle.insert(cycle.end(), bounce.begin(), bounce.end());
    } else {
        cycle = out_att;
        std::vector<LoopStage> bounce = in_att;  // send s's state back to a
        bounce[0].at = {0, s};
        bounce[7].then = {0, s};  // wrap into the next outward attempt
        cycle.insert(cycle.end(), bounce.begin(), bounce.end());
    }
    return cycle;
}

}  // namespace

LoweringResult lower_movements(const MachineDefinition& src) {
    throw_if_nonconformant(src, 'F', "lower_movements");

    LoweringResult res;
    MachineDefinition& out = res.machine;
    out.tapes = src.tapes;
    out.head_tape = src.head_tape;
    out.moves = ResourceModel::get('G').moves;
    out.lambda0 = src.lambda0;
    out.start_positions = src.start_positions;
    out.input_tape = src.input_tape;
    out.input_origin = src.input_origin;
    out.output_head = src.output_head;
    out.output_width = src.output_width;

    for (const auto& name : src.state_names) out.intern_state(name);
    out.initial_state = src.initial_state;
    out.final_state = src.final_state;
    for (const auto& obs : src.observables) out.intern_observable(obs);

    Namer namer(out);
    const int noop = out.intern_observable("II");
    const int k = src.head_count();

    res.report.source_model = 'F';
    res.report.target_model = 'G';
    res.report.states_before = static_cast<int>(src.state_names.size());

    // Walk chains depend only on (jump, target state); transitions sharing
    // both share one chain.
    std::map<std::pair<std::int64_t, int>, int> walk_cache;
    auto walk_chain = [&](std::int64_t d, int target) {
        auto key = std::make_pair(d, target);
        auto it = walk_cache.find(key);
        if (it != walk_cache.end()) return it->second;
        const std::int64_t len = d > 0 ? d : -d;
        const std::int64_t tau = d > 0 ? 1 : -1;
        std::vector<int> walk;
        for (std::int64_t i = 0; i < len; i++)
            walk.push_back(namer.fresh(src.state_names[target] + "~" +
                                       (d > 0 ? "r" : "l") + std::to_string(len - i)));
        for (std::int64_t i = 0; i + 1 < len; i++)
            add_row(out, walk[i], std::nullopt, walk[i + 1], noop, {0, tau});
        add_row(out, walk[len - 1], std::nullopt, target, noop, {0, tau});
        walk_cache[key] = walk[0];
        return walk[0];
    };

    for (const auto& [key, t] : src.delta) {
        const auto& [q, tag_index] = key;
        OutcomeTag tag = OutcomeTag::from_index(tag_index, k);
        LoweringReport::Expansion exp;
        exp.state = src.state_names[q];
        exp.tag = tag.str();

        const std::int64_t d = t.move[1];
        if (d >= -1 && d <= 1) {
            add_row(out, q, tag, t.next_state, t.observable, t.move);
            exp.kind = "copy";
            exp.rows_emitted = 1;
        } else {
            // Measure in place, then walk unit steps; the no-op steps keep
            // the measured outcome as the driving outcome at arrival.
            const std::size_t states0 = out.state_names.size();
            int w0 = walk_chain(d, t.next_state);
            add_row(out, q, tag, w0, t.observable, {0, 0});
            exp.kind = "walk";
            exp.inserted_states = static_cast<int>(out.state_names.size() - states0);
            exp.rows_emitted = exp.inserted_states + 1;
            res.report.inserted_gadget_count++;
        }
        res.report.expansions.push_back(std::move(exp));
    }
    res.report.states_after = static_cast<int>(out.state_names.size());

    // Finiteness: at most one walk chain (bounded by the longest jump) per
    // (jump, target) pair, so growth stays linear in the jump length.
    std::int64_t max_jump = 1;
    for (const auto& [key2, t2] : src.delta) {
        (void)key2;
        max_jump = std::max<std::int64_t>(max_jump, std::llabs(t2.move[1]));
    }
    if (res.report.states_after >
        res.report.states_before * static_cast<int>(max_jump + 2) * (1 << k))
        throw std::logic_error("lower_movements: state growth exceeded its bound");
    return res;
}

LoweringResult lower_same_tape_measurements(const MachineDefinition& src, LoweringBackend backend,
                                            std::int64_t offset_cap) {
    throw_if_nonconformant(src, 'A', "lower_same_tape_measurements");

    const bool teleport = backend == LoweringBackend::teleport;
    if (teleport && src.output_width > 1)
        throw std::invalid_argument(
            "teleport backend: the interleaved cell layout supports output width 1 only "
            "(machine declares width " +
            std::to_string(src.output_width) + "); use the transfer backend");
    const std::int64_t f = teleport ? 2 : 1;  // source cell n lives at target cell f*n

    // Reachable (state, head offset, driving outcome) triples. The offset
    // p1 - p0 is data the single infinite head needs; it must stay bounded
    // for the machine to remain finite.
    const std::int64_t w0 = src.start_positions[1] - src.start_positions[0];
    using Key = std::tuple<int, std::int64_t, int>;
    std::set<Key> reachable;
    std::deque<Key> queue;
    reachable.insert({src.initial_state, w0, src.lambda0.index()});
    queue.push_back({src.initial_state, w0, src.lambda0.index()});
    while (!queue.empty()) {
        auto [q, w, li] = queue.front();
        queue.pop_front();
        if (q == src.final_state) continue;
        auto it = src.delta.find({q, li});
        if (it == src.delta.end()) continue;  // undefined pair; fails at run time either way
        std::int64_t w2 = w + it->second.move[1] - it->second.move[0];
        if (w2 > offset_cap || w2 < -offset_cap)
            throw std::invalid_argument(
                "head offset analysis: offset " + std::to_string(w2) + " exceeds the cap " +
                std::to_string(offset_cap) +
                "; the machine's head separation is unbounded (or raise the cap)");
        const Observable& obs = src.observables[it->second.observable];
        std::vector<int> next_tags;
        if (obs.is_noop()) {
            next_tags.push_back(li);
        } else {
            for (std::size_t b = 0; b < obs.branches.size(); b++)
                next_tags.push_back(obs.tag_for_branch(static_cast<int>(b), 2).index());
        }
        for (int nt : next_tags)
            if (reachable.insert({it->second.next_state, w2, nt}).second)
                queue.push_back({it->second.next_state, w2, nt});
        if (reachable.size() > 4096)
            throw std::invalid_argument(
                "head offset analysis: more than 4096 (state, offset, outcome) triples "
                "reachable; the machine's head separation looks unbounded");
    }

    LoweringResult res;
    MachineDefinition& out = res.machine;
    out.tapes = teleport ? std::vector<TapeSpec>{TapeSpec{2}, TapeSpec{}}
                         : std::vector<TapeSpec>{TapeSpec{1}, TapeSpec{}};
    out.head_tape = {0, 1};
    if (teleport) {
        out.moves.comps.push_back(MoveComponent{false, {-1, 0, 1}});
        out.moves.comps.push_back(MoveComponent{true, {}});
    } else {
        out.moves.comps.push_back(MoveComponent{false, {0}});
        out.moves.comps.push_back(MoveComponent{true, {}});
    }
    out.lambda0 = src.lambda0;
    out.start_positions = {0, src.start_positions[0] * f};
    out.input_tape = 1;
    out.input_origin = src.input_origin * f;
    out.output_head = 1;
    out.output_width = src.output_width;

    Namer namer(out);
    const int noop = out.intern_observable("II");

    // Final state keeps the source's name.
    out.final_state = namer.fresh(src.state_names[src.final_state]);

    // Entry states: (source state, offset, pending outcome). All their rows
    // are wildcards; the pending outcome is part of the state.
    std::map<std::tuple<int, std::int64_t, int>, int> entry_states;
    auto entry_state = [&](int q, std::int64_t w, int tag_index) {
        if (q == src.final_state) return out.final_state;
        auto key = std::make_tuple(q, w, tag_index);
        auto it = entry_states.find(key);
        if (it != entry_states.end()) return it->second;
        int id = namer.fresh(src.state_names[q] + "~" + offset_str(w) + "~l" +
                             std::to_string(tag_index));
        entry_states[key] = id;
        return id;
    };

    out.initial_state = entry_state(src.initial_state, w0, src.lambda0.index());

    res.report.source_model = 'A';
    res.report.target_model = teleport ? 'E' : 'F';
    res.report.states_before = static_cast<int>(src.state_names.size());

    for (const auto& [q, w, ti] : reachable) {
        if (q == src.final_state) continue;
        {
            auto dit = src.delta.find({q, ti});
            if (dit == src.delta.end()) continue;
            const Transition& t = dit->second;
            const Observable& obs = src.observables[t.observable];
            const std::int64_t d0 = t.move[0], d1 = t.move[1];
            const std::int64_t w2 = w + d1 - d0;
            const int E = entry_state(q, w, ti);
            const std::string prefix =
                "g~" + src.state_names[q] + "~" + offset_str(w) + "~l" + std::to_string(ti);

            const bool to_final = t.next_state == src.final_state;
            // Position (relative to p0, in target cells) the head must hold
            // when the simulated transition completes.
            const std::int64_t landing =
                to_final ? (src.output_head == 0 ? d0 : w + d1) * f : d0 * f;

            LoweringReport::Expansion exp;
            exp.state = src.state_names[q];
            exp.tag = OutcomeTag::from_index(ti, 2).str() + "@" + offset_str(w);
            const std::size_t states0 = out.state_names.size();
            const std::size_t rows0 = out.delta.size();

            if (obs.is_noop()) {
                add_row(out, E, std::nullopt, entry_state(t.next_state, w2, ti), noop,
                        {0, landing});
                exp.kind = "move";
            } else if (auto sf = obs.single_factor()) {
                // One-cell measurement: the infinite head measures it in
                // place; the outcome drives the next entry state directly
                // through a keyed dispatch.
                std::string letter;
                if (sf->op.approx_equal(mats::X(), kProjectorTolerance))
                    letter = "X";
                else if (sf->op.approx_equal(mats::Z(), kProjectorTolerance))
                    letter = "Z";
                else
                    throw std::invalid_argument("unsupported one-cell factor in observable " +
                                                obs.name);
                const int lowered = out.intern_observable("I" + letter);
                const std::int64_t cell = (sf->slot == 0 ? 0 : w) * f;
                int G = namer.fresh(prefix + "~d");
                if (cell == 0) {
                    add_row(out, E, std::nullopt, G, lowered, {0, landing});
                    res.report.simulated_measurement_states.push_back(out.state_names[E]);
                } else {
                    int E2 = namer.fresh(prefix + "~r");
                    add_row(out, E, std::nullopt, E2, noop, {0, cell});
                    add_row(out, E2, std::nullopt, G, lowered, {0, landing - cell});
                    res.report.simulated_measurement_states.push_back(out.state_names[E2]);
                }
                for (int o : {+1, -1}) {
                    OutcomeTag tag = OutcomeTag::scalar(o, 2);
                    add_row(out, G, tag, entry_state(t.next_state, w2, tag.index()), noop, {0, 0});
                }
                exp.kind = "single";
            } else {
                // Genuine two-cell measurement. The first operand's state is
                // moved onto the finite tape, the observable fires across the
                // tapes, and the state is moved back. XX+YX swaps operands by
                // moving the second cell instead and measuring XX+XY.
                const bool swap = obs.name == "XX+YX";
                const std::string spelling = swap ? "XX+XY" : obs.name;
                const std::int64_t src_rel = (swap ? w : 0) * f;
                const std::int64_t other_rel = (swap ? 0 : w) * f;
                const int spelled = out.intern_observable(spelling);

                int OST = namer.fresh(prefix + "~m");
                int DSP = namer.fresh(prefix + "~d");
                res.report.simulated_measurement_states.push_back(out.state_names[OST]);

                // in: infinite cell -> finite tape
                int in_entry;
                if (teleport) {
                    in_entry = emit_pauli_loop(out, namer, prefix + "~in",
                                               teleport_cycle(true, src_rel), 7, OST,
                                               {0, other_rel}, noop);
                } else {
                    in_entry = emit_pauli_loop(out, namer, prefix + "~in",
                                               transfer_cycle(true, {0, src_rel}), 2, OST,
                                               {0, other_rel}, noop);
                }
                add_row(out, E, std::nullopt, in_entry, noop, {0, src_rel});

                // the simulated measurement, then back to the source cell
                add_row(out, OST, std::nullopt, DSP, spelled, {0, src_rel - other_rel});

                for (int o : {+1, -1}) {
                    OutcomeTag tag = OutcomeTag::scalar(o, 2);
                    int target = entry_state(t.next_state, w2, tag.index());
                    int out_entry;
                    if (teleport) {
                        out_entry = emit_pauli_loop(
                            out, namer, prefix + "~out" + (o > 0 ? "p" : "m"),
                            teleport_cycle(false, src_rel), 7, target,
                            {0, landing}, noop);
                    } else {
                        out_entry = emit_pauli_loop(
                            out, namer, prefix + "~out" + (o > 0 ? "p" : "m"),
                            transfer_cycle(false, {0, src_rel}), 2, target,
                            {0, landing}, noop);
                    }
                    add_row(out, DSP, tag, out_entry, noop, {0, 0});
                }
                exp.kind = teleport ? "teleport" : "transfer";
                res.report.inserted_gadget_count += 2;
            }
            exp.inserted_states = static_cast<int>(out.state_names.size() - states0);
            exp.rows_emitted = static_cast<int>(out.delta.size() - rows0);
            res.report.expansions.push_back(std::move(exp));
        }
    }
    res.report.states_after = static_cast<int>(out.state_names.size());
    return res;
}

std::vector<std::string> check_conformance(const MachineDefinition& m, const ResourceModel& model) {
    std::vector<std::string> out = m.check_definition();
    auto viol = validate_model(m, model);
    out.insert(out.end(), viol.begin(), viol.end());
    return out;
}

}  // namespace mqtm
