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

#include <stdexcept>
#include <string>

#include "mqtm/machine.hpp"

namespace mqtm {

/// Parse failure with a 1-based source line number.
struct ParseError : std::runtime_error {
    int line;
    ParseError(int line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line(line) {}
};

/// Line-oriented machine description:
///
///   # comment
///   tapes: 1,inf
///   heads: 2 (0,1)
///   moves: {0}xZ
///   observables: F            (a model letter A..G, or an explicit list)
///   initial: q0
///   final: qf
///   lambda0: (+1,+1)          (optional; defaults to all +1)
///   start: (0,0)              (optional; defaults to zeros)
///   input: head 1             (optional; or `input: tape 1 at 0`)
///   output: head 1 width 1    (optional)
///   q0 (+1,+1) -> s1 XX (0,0)
///   s1 _ -> qf ZI (0,1)
///
/// `_` is the outcome wildcard; wildcard rows are expanded to every outcome
/// symbol at load time.
MachineDefinition parse_machine(const std::string& text);
MachineDefinition load_machine_file(const std::string& path);

std::string write_machine(const MachineDefinition& m);
void save_machine_file(const MachineDefinition& m, const std::string& path);

/// Semantic equality: same geometry, same transitions keyed by state names
/// and outcome tags, same observables by name. State numbering may differ.
bool equivalent_machines(const MachineDefinition& a, const MachineDefinition& b);

}  // namespace mqtm
