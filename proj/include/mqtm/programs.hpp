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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mqtm/machine.hpp"
#include "mqtm/pauli.hpp"

namespace mqtm {

/// One transition row of a fragment. `on == nullopt` is the outcome
/// wildcard; `to` may name a fragment state or an exit label.
struct FragmentRow {
    std::string from;
    std::optional<OutcomeTag> on;
    std::string to;
    std::string obs;
    std::vector<std::int64_t> move;
};

/// A composable piece of classical control: fresh states with one entry and
/// named exits, plus the tape geometry it expects. Fragments become runnable
/// machines via standalone_machine(), or get stitched into larger tables by
/// the lowering passes.
struct MachineFragment {
    std::vector<TapeSpec> tapes;
    std::vector<int> head_tape;
    MoveSet moves;
    std::vector<std::string> observables;  // spellings used by the rows

    std::vector<std::string> states;
    std::string entry;
    std::vector<std::string> exits;
    std::vector<FragmentRow> rows;

    std::map<std::string, CellId> cells_used;  // role -> cell
    std::vector<std::int64_t> entry_positions;
    std::map<std::string, std::vector<std::int64_t>> exit_positions;

    int input_tape = 0;
    std::int64_t input_origin = 0;
    int output_head = 0;
    int output_width = 1;

    int head_count() const { return static_cast<int>(head_tape.size()); }
};

/// Wraps a fragment into a complete machine: every exit is wired to a fresh
/// final state.
MachineDefinition standalone_machine(const MachineFragment& frag,
                                     const std::string& final_name = "qf");

/// State transfer from an infinite-tape cell to the one-cell finite tape:
/// Z on the destination, X(x)X on the pair, Z on the source. The residual
/// Pauli is tracked through classical states; on a nonidentity residual the
/// transfer runs again (destination back to the source cell and once more
/// to the destination) until the composed residual is the identity. Exits
/// at "done" with the transferred state on the finite cell.
MachineFragment build_state_transfer(CellId source_j, CellId dest_a,
                                     const std::string& prefix = "xfer");

/// The six-measurement sequence assigning a Bell pair to two same-tape
/// cells a, b with one auxiliary cell c on the other tape:
///   Z(a), Z(b), Z(c), XX(c,a), XX(c,b), Z(c).
/// Linear control; the outcome trace determines the Pauli frame on (a, b).
MachineFragment build_bell_prep(CellId a, CellId b, CellId c,
                                const std::string& prefix = "bell");

/// Teleports the source cell's state to `dest_a`: Bell-prepares (a, b) via
/// c, then Bell-measures (source, b) as Z(x)Z followed by X(x)X. A quarter
/// of the branch mass lands with identity residual and exits; otherwise the
/// state bounces through the source-side cells and a fresh attempt runs.
/// The working cells are reinitialized by the measurements themselves, so
/// the loop reuses them instead of consuming fresh auxiliaries.
MachineFragment build_teleport(CellId source_j, CellId dest_a, CellId helper_b, CellId aux_c,
                               const std::string& prefix = "tp");

/// Writes a classical bit: Z-read first, exit when the cell already holds
/// the bit, otherwise X then Z until the wanted outcome appears. With
/// `literal` the initial read is skipped and the X/Z loop always runs.
MachineFragment build_classical_write(int bit, CellId cell, bool literal = false,
                                      const std::string& prefix = "wr");

/// Single-tape binary Turing machine plus its direct interpreter (the test
/// oracle for the embedding).
struct ClassicalTm {
    struct Rule {
        std::string next;
        int write = 0;
        int move = 0;  // -1, 0, +1
    };
    std::vector<std::string> states;
    std::string initial;
    std::string final_state;
    std::map<std::pair<std::string, int>, Rule> rules;

    struct Result {
        std::map<std::int64_t, int> tape;
        std::int64_t position = 0;
        bool halted = false;
        std::int64_t steps = 0;
    };
    Result interpret(std::map<std::int64_t, int> tape, std::int64_t position,
                     std::int64_t fuel) const;
};

/// Embeds a binary TM into model C control: bits become basis states,
/// reading is a Z measurement, writing is the X/Z repetition. The embedded
/// machine validates against resource model C.
MachineDefinition embed_classical_tm(const ClassicalTm& tm, int output_width);

ClassicalTm make_bitflip_tm();
/// Three-cell binary increment (mod 8) that returns the head to cell 0.
ClassicalTm make_increment3_tm();

}  // namespace mqtm
