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

#include "mqtm/programs.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace mqtm {

namespace {

Pauli x_fold(int outcome) { return Pauli{outcome < 0, false}; }
Pauli z_fold(int outcome) { return Pauli{false, outcome < 0}; }

const Pauli kPaulis[4] = {Pauli{false, false}, Pauli{true, false}, Pauli{true, true},
                          Pauli{false, true}};

/// Emits rows while tracking where the heads sit at each state, so that a
/// mis-scheduled measurement or movement fails at build time instead of at
/// run time.
class FragmentBuilder {
  public:
    FragmentBuilder(MachineFragment& frag, std::string prefix)
        : frag_(frag), prefix_(std::move(prefix)) {}

    std::string st(const std::string& short_name) const { return prefix_ + "_" + short_name; }

    void set_entry(const std::string& short_name, std::vector<std::int64_t> positions) {
        frag_.entry = st(short_name);
        frag_.entry_positions = positions;
        declare(frag_.entry, std::move(positions));
    }

    void declare_state(const std::string& short_name, std::vector<std::int64_t> positions) {
        declare(st(short_name), std::move(positions));
    }

    void declare_exit(const std::string& label) { frag_.exits.push_back(label); }

    /// from/to are short names; `to` may also be an exit label. `at` is where
    /// the heads must be when this row's observable fires; `then` is where
    /// they are afterwards (the row's movement is their difference).
    void row(const std::string& from, std::optional<int> on_scalar, const std::string& to,
             const std::string& obs, const std::vector<std::int64_t>& at,
             const std::vector<std::int64_t>& then) {
        std::string full_from = st(from);
        bool to_exit =
            std::find(frag_.exits.begin(), frag_.exits.end(), to) != frag_.exits.end();
        std::string full_to = to_exit ? to : st(to);

        auto it = pos_.find(full_from);
        if (it == pos_.end())
            throw std::logic_error("fragment row from undeclared state " + full_from);
        if (it->second != at)
            throw std::logic_error("fragment scheduling: state " + full_from +
                                   " is not at the expected head positions");

        if (to_exit)
            frag_.exit_positions[full_to] = then;
        declare(full_to, then, to_exit);

        FragmentRow r;
        r.from = full_from;
        r.on = on_scalar ? std::optional<OutcomeTag>(
                               OutcomeTag::scalar(*on_scalar, frag_.head_count()))
                         : std::nullopt;
        r.to = full_to;
        r.obs = obs;
        r.move.resize(at.size());
        for (std::size_t i = 0; i < at.size(); i++) r.move[i] = then[i] - at[i];
        frag_.rows.push_back(std::move(r));

        if (std::find(frag_.observables.begin(), frag_.observables.end(), obs) ==
            frag_.observables.end())
            frag_.observables.push_back(obs);
    }

  private:
    void declare(const std::string& full_name, std::vector<std::int64_t> positions,
                 bool exit_label = false) {
        auto it = pos_.find(full_name);
        if (it != pos_.end()) {
            if (it->second != positions)
                throw std::logic_error("fragment scheduling: state " + full_name +
                                       " reached with inconsistent head positions");
            return;
        }
        pos_[full_name] = std::move(positions);
        if (!exit_label) frag_.states.push_back(full_name);
    }

    MachineFragment& frag_;
    std::string prefix_;
    std::map<std::string, std::vector<std::int64_t>> pos_;
};

std::string frame_name(const std::string& base, Pauli f) {
    return base + std::string(1, f.letter());
}

}  // namespace

MachineDefinition standalone_machine(const MachineFragment& frag, const std::string& final_name) {
    MachineDefinition m;
    m.tapes = frag.tapes;
    m.head_tape = frag.head_tape;
    m.moves = frag.moves;
    m.lambda0 = OutcomeTag::all_plus(frag.head_count());
    m.start_positions = frag.entry_positions;
    m.input_tape = frag.input_tape;
    m.input_origin = frag.input_origin;
    m.output_head = frag.output_head;
    m.output_width = frag.output_width;

    for (const std::string& spelling : frag.observables) m.intern_observable(spelling);

    std::string fin = final_name;
    while (std::find(frag.states.begin(), frag.states.end(), fin) != frag.states.end())
        fin += "_";
    m.initial_state = m.intern_state(frag.entry);
    m.final_state = m.intern_state(fin);

    const int k = frag.head_count();
    for (const FragmentRow& r : frag.rows) {
        bool to_exit =
            std::find(frag.exits.begin(), frag.exits.end(), r.to) != frag.exits.end();
        Transition t;
        t.next_state = to_exit ? m.final_state : m.intern_state(r.to);
        t.observable = m.observable_index.at(r.obs);
        t.move = r.move;
        int from = m.intern_state(r.from);
        if (r.on) {
            m.set_transition(from, *r.on, t);
        } else {
            for (int i = 0; i < (1 << k); i++)
                m.set_transition(from, OutcomeTag::from_index(i, k), t);
        }
    }
    return m;
}

MachineFragment build_state_transfer(CellId source_j, CellId dest_a, const std::string& prefix) {
    if (source_j.tape == dest_a.tape)
        throw std::invalid_argument("state transfer needs the source and destination on "
                                    "different tapes");
    if (source_j.tape != 1 || dest_a.tape != 0 || dest_a.index != 0)
        throw std::invalid_argument("state transfer expects the destination on the one-cell "
                                    "finite tape 0 and the source on the infinite tape 1");

    MachineFragment frag;
    frag.tapes = {TapeSpec{1}, TapeSpec{}};
    frag.head_tape = {0, 1};
    frag.moves.comps.push_back(MoveComponent{false, {0}});
    frag.moves.comps.push_back(MoveComponent{true, {}});
    frag.cells_used = {{"source", source_j}, {"dest", dest_a}};
    frag.input_tape = 1;
    frag.input_origin = source_j.index;
    frag.output_head = 0;
    frag.output_width = 1;

    FragmentBuilder b(frag, prefix);
    b.declare_exit("done");
    const std::vector<std::int64_t> at = {dest_a.index, source_j.index};

    // Hop toward the finite cell: Z(dest), XX, Z(source); outcomes fold into
    // the residual as X, Z, X exponents. Hop back mirrors it. Exits fire
    // only when a hop lands on the finite cell with identity residual.
    b.set_entry("s0", at);
    for (Pauli f : kPaulis)
        for (const char* base : {"s1", "s2", "s3", "t1", "t2", "t3"})
            b.declare_state(frame_name(base, f), at);
    b.row("s0", std::nullopt, frame_name("s1", Pauli{}), "ZI", at, at);
    for (Pauli f : kPaulis) {
        for (int o : {+1, -1}) {
            b.row(frame_name("s1", f), o, frame_name("s2", f * x_fold(o)), "XX", at, at);
            b.row(frame_name("s2", f), o, frame_name("s3", f * z_fold(o)), "IZ", at, at);
            Pauli g = f * x_fold(o);
            if (g.is_identity())
                b.row(frame_name("s3", f), o, "done", "II", at, at);
            else
                b.row(frame_name("s3", f), o, frame_name("t1", g), "IZ", at, at);
            b.row(frame_name("t1", f), o, frame_name("t2", f * x_fold(o)), "XX", at, at);
            b.row(frame_name("t2", f), o, frame_name("t3", f * z_fold(o)), "ZI", at, at);
            b.row(frame_name("t3", f), o, frame_name("s1", f * x_fold(o)), "ZI", at, at);
        }
    }
    return frag;
}

MachineFragment build_bell_prep(CellId a, CellId b, CellId c, const std::string& prefix) {
    if (a.tape != b.tape || a.tape == c.tape)
        throw std::invalid_argument("Bell preparation pairs two cells of one tape with an "
                                    "auxiliary cell on the other tape");
    if (a.tape != 1 || b.index != a.index + 1)
        throw std::invalid_argument("Bell preparation expects a, b adjacent on tape 1 and the "
                                    "auxiliary on tape 0");

    MachineFragment frag;
    frag.tapes = {TapeSpec{}, TapeSpec{}};
    frag.head_tape = {0, 1};
    frag.moves = MoveSet::all(2);
    frag.cells_used = {{"a", a}, {"b", b}, {"c", c}};
    frag.input_tape = 0;
    frag.input_origin = c.index;
    frag.output_head = 1;
    frag.output_width = 2;

    const std::int64_t A = a.index, B = b.index, C = c.index;
    FragmentBuilder bld(frag, prefix);
    bld.declare_exit("done");

    bld.set_entry("p1", {C, A});
    bld.row("p1", std::nullopt, "p2", "IZ", {C, A}, {C, B});  // Z(a)
    bld.row("p2", std::nullopt, "p3", "IZ", {C, B}, {C, B});  // Z(b)
    bld.row("p3", std::nullopt, "p4", "ZI", {C, B}, {C, A});  // Z(c)
    bld.row("p4", std::nullopt, "p5", "XX", {C, A}, {C, B});  // XX(c,a)
    bld.row("p5", std::nullopt, "p6", "XX", {C, B}, {C, B});  // XX(c,b)
    bld.row("p6", std::nullopt, "p7", "ZI", {C, B}, {C, A});  // Z(c)
    bld.row("p7", std::nullopt, "done", "II", {C, A}, {C, A});
    return frag;
}

MachineFragment build_teleport(CellId source_j, CellId dest_a, CellId helper_b, CellId aux_c,
                               const std::string& prefix) {
    if (source_j.tape != 0 || aux_c.tape != 0 || dest_a.tape != 1 || helper_b.tape != 1)
        throw std::invalid_argument("teleport expects source and auxiliary on tape 0, "
                                    "destination and helper on tape 1");
    if (source_j.index == aux_c.index || dest_a.index == helper_b.index)
        throw std::invalid_argument("teleport cells must be distinct per tape");

    MachineFragment frag;
    frag.tapes = {TapeSpec{}, TapeSpec{}};
    frag.head_tape = {0, 1};
    frag.moves = MoveSet::all(2);
    frag.cells_used = {{"source", source_j}, {"dest", dest_a}, {"helper", helper_b},
                       {"aux", aux_c}};
    frag.input_tape = 0;
    frag.input_origin = source_j.index;
    frag.output_head = 1;
    frag.output_width = 1;

    const std::int64_t J = source_j.index, C = aux_c.index;
    const std::int64_t A = dest_a.index, B = helper_b.index;

    FragmentBuilder bld(frag, prefix);
    bld.declare_exit("done");

    // Attempt: Bell pair on (a,b) via c, then the Bell measurement on
    // (source, b) as ZZ then XX. Z outcomes fold into the X exponent of the
    // running residual, XX outcomes into the Z exponent; the ZZ/XX Bell
    // measurement outcomes fold into X/Z respectively.
    bld.set_entry("a1", {J, A});
    for (Pauli f : kPaulis) {
        bld.declare_state(frame_name("a2", f), {J, B});
        bld.declare_state(frame_name("a3", f), {C, B});
        bld.declare_state(frame_name("a4", f), {C, A});
        bld.declare_state(frame_name("a5", f), {C, B});
        bld.declare_state(frame_name("a6", f), {C, B});
        bld.declare_state(frame_name("a7", f), {J, B});
        bld.declare_state(frame_name("a8", f), {J, B});
        bld.declare_state(frame_name("a9", f), {J, B});
        bld.declare_state(frame_name("b1", f), {C, B});
        bld.declare_state(frame_name("b2", f), {C, B});
        bld.declare_state(frame_name("b3", f), {J, B});
        bld.declare_state(frame_name("b4", f), {C, B});
        bld.declare_state(frame_name("b5", f), {C, B});
        bld.declare_state(frame_name("b6", f), {C, A});
        bld.declare_state(frame_name("b7", f), {C, A});
        bld.declare_state(frame_name("b8", f), {C, A});
    }
    bld.row("a1", std::nullopt, frame_name("a2", Pauli{}), "IZ", {J, A}, {J, B});
    for (Pauli f : kPaulis) {
        for (int o : {+1, -1}) {
            Pauli fx = f * x_fold(o);
            Pauli fz = f * z_fold(o);
            bld.row(frame_name("a2", f), o, frame_name("a3", fx), "IZ", {J, B}, {C, B});
            bld.row(frame_name("a3", f), o, frame_name("a4", fx), "ZI", {C, B}, {C, A});
            bld.row(frame_name("a4", f), o, frame_name("a5", fx), "XX", {C, A}, {C, B});
            bld.row(frame_name("a5", f), o, frame_name("a6", fz), "XX", {C, B}, {C, B});
            bld.row(frame_name("a6", f), o, frame_name("a7", fz), "ZI", {C, B}, {J, B});
            bld.row(frame_name("a7", f), o, frame_name("a8", fx), "ZZ", {J, B}, {J, B});
            bld.row(frame_name("a8", f), o, frame_name("a9", fx), "XX", {J, B}, {J, B});
            // a9 decides: identity residual exits with the head parked on the
            // destination; otherwise start the bounce leg.
            if (fz.is_identity())
                bld.row(frame_name("a9", f), o, "done", "II", {J, B}, {J, A});
            else
                bld.row(frame_name("a9", f), o, frame_name("b1", fz), "ZI", {J, B}, {C, B});
            // Bounce: pair (source j, aux c) via b, Bell measurement on
            // (a, c); the state lands back on the source side, then a fresh
            // attempt runs.
            bld.row(frame_name("b1", f), o, frame_name("b2", fx), "ZI", {C, B}, {C, B});
            bld.row(frame_name("b2", f), o, frame_name("b3", fx), "IZ", {C, B}, {J, B});
            bld.row(frame_name("b3", f), o, frame_name("b4", fx), "XX", {J, B}, {C, B});
            bld.row(frame_name("b4", f), o, frame_name("b5", fz), "XX", {C, B}, {C, B});
            bld.row(frame_name("b5", f), o, frame_name("b6", fz), "IZ", {C, B}, {C, A});
            bld.row(frame_name("b6", f), o, frame_name("b7", fx), "ZZ", {C, A}, {C, A});
            bld.row(frame_name("b7", f), o, frame_name("b8", fx), "XX", {C, A}, {C, A});
            bld.row(frame_name("b8", f), o, frame_name("a2", fz), "IZ", {C, A}, {J, B});
        }
    }
    return frag;
}

MachineFragment build_classical_write(int bit, CellId cell, bool literal,
                                      const std::string& prefix) {
    if (bit != 0 && bit != 1) throw std::invalid_argument("write bit must be 0 or 1");

    MachineFragment frag;
    frag.tapes = {TapeSpec{}};
    frag.head_tape = {0};
    frag.moves = MoveSet::explicit1({-1, 0, 1});
    frag.cells_used = {{"cell", cell}};
    frag.input_tape = 0;
    frag.input_origin = cell.index;
    frag.output_head = 0;
    frag.output_width = 1;

    const std::vector<std::int64_t> at = {cell.index};
    const int match = bit == 0 ? +1 : -1;

    FragmentBuilder b(frag, prefix);
    b.declare_exit("done");

    if (literal) {
        b.set_entry("l0", at);
        b.row("l0", std::nullopt, "wx", "X", at, at);
    } else {
        b.set_entry("rd", at);
        b.row("rd", std::nullopt, "dp", "Z", at, at);
        b.row("dp", match, "done", "I", at, at);
        b.row("dp", -match, "wx", "X", at, at);
    }
    for (int o : {+1, -1}) b.row("wx", o, "wd", "Z", at, at);
    b.row("wd", match, "done", "I", at, at);
    b.row("wd", -match, "wx", "X", at, at);
    return frag;
}

ClassicalTm::Result ClassicalTm::interpret(std::map<std::int64_t, int> tape,
                                           std::int64_t position, std::int64_t fuel) const {
    Result r;
    r.tape = std::move(tape);
    r.position = position;
    std::string state = initial;
    while (state != final_state && r.steps < fuel) {
        int bit = r.tape.count(r.position) ? r.tape.at(r.position) : 0;
        auto it = rules.find({state, bit});
        if (it == rules.end())
            throw std::runtime_error("classical TM has no rule for (" + state + ", " +
                                     std::to_string(bit) + ")");
        r.tape[r.position] = it->second.write;
        r.position += it->second.move;
        state = it->second.next;
        r.steps++;
    }
    r.halted = state == final_state;
    return r;
}

MachineDefinition embed_classical_tm(const ClassicalTm& tm, int output_width) {
    MachineDefinition m;
    m.tapes = {TapeSpec{}};
    m.head_tape = {0};
    m.moves = MoveSet::explicit1({-1, 0, 1});
    m.lambda0 = OutcomeTag::all_plus(1);
    m.start_positions = {0};
    m.input_tape = 0;
    m.input_origin = 0;
    m.output_head = 0;
    m.output_width = output_width;

    const int obs_z = m.intern_observable("Z");
    const int obs_x = m.intern_observable("X");
    const int obs_i = m.intern_observable("I");

    auto tag_for_bit = [](int bit) { return OutcomeTag::scalar(bit == 0 ? +1 : -1, 1); };

    m.initial_state = m.intern_state("rd_" + tm.initial);
    m.final_state = m.intern_state("halt");

    auto read_state = [&](const std::string& s) {
        return s == tm.final_state ? m.final_state : m.intern_state("rd_" + s);
    };

    std::set<std::string> readers;
    for (const auto& [key, rule] : tm.rules) {
        const auto& [s, bit] = key;
        if (s == tm.final_state)
            throw std::invalid_argument("classical TM has a rule out of its final state");
        if (readers.insert(s).second) {
            Transition t{m.intern_state("dp_" + s), obs_z, {0}};
            for (int i = 0; i < 2; i++)
                m.set_transition(m.intern_state("rd_" + s), OutcomeTag::from_index(i, 1), t);
        }
        int dp = m.intern_state("dp_" + s);
        int target = read_state(rule.next);
        if (rule.write == bit) {
            // Value already in place: no write loop, just move on.
            m.set_transition(dp, tag_for_bit(bit), Transition{target, obs_i, {rule.move}});
        } else {
            std::string suffix = "_" + s + "_" + std::to_string(bit);
            int wz = m.intern_state("wz" + suffix);
            int wd = m.intern_state("wd" + suffix);
            m.set_transition(dp, tag_for_bit(bit), Transition{wz, obs_x, {0}});
            for (int i = 0; i < 2; i++)
                m.set_transition(wz, OutcomeTag::from_index(i, 1), Transition{wd, obs_z, {0}});
            m.set_transition(wd, tag_for_bit(rule.write), Transition{target, obs_i, {rule.move}});
            m.set_transition(wd, tag_for_bit(1 - rule.write), Transition{wz, obs_x, {0}});
        }
    }
    return m;
}

ClassicalTm make_bitflip_tm() {
    ClassicalTm tm;
    tm.states = {"s", "halt"};
    tm.initial = "s";
    tm.final_state = "halt";
    tm.rules[{"s", 0}] = {"halt", 1, 0};
    tm.rules[{"s", 1}] = {"halt", 0, 0};
    return tm;
}

ClassicalTm make_increment3_tm() {
    // Walk to the least significant cell (index 2), ripple the carry back
    // toward cell 0, then return the head to cell 0 and halt. 111 wraps to
    // 000.
    ClassicalTm tm;
    tm.states = {"a0", "a1", "a2", "c1", "c0", "r1", "r0", "halt"};
    tm.initial = "a0";
    tm.final_state = "halt";
    for (int b : {0, 1}) {
        tm.rules[{"a0", b}] = {"a1", b, +1};
        tm.rules[{"a1", b}] = {"a2", b, +1};
        tm.rules[{"r1", b}] = {"r0", b, -1};
        tm.rules[{"r0", b}] = {"halt", b, 0};
    }
    tm.rules[{"a2", 1}] = {"c1", 0, -1};
    tm.rules[{"a2", 0}] = {"r1", 1, -1};
    tm.rules[{"c1", 1}] = {"c0", 0, -1};
    tm.rules[{"c1", 0}] = {"r0", 1, -1};
    tm.rules[{"c0", 1}] = {"halt", 0, 0};
    tm.rules[{"c0", 0}] = {"halt", 1, 0};
    return tm;
}

}  // namespace mqtm
