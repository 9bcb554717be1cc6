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
#include <string>
#include <vector>

#include "mqtm/machine.hpp"

namespace mqtm {

struct LoweringReport {
    char source_model = ' ';
    char target_model = ' ';
    int states_before = 0;
    int states_after = 0;
    int inserted_gadget_count = 0;

    struct Expansion {
        std::string state;
        std::string tag;
        std::string kind;  // copy | walk | move | single | transfer | teleport
        int inserted_states = 0;
        int rows_emitted = 0;
    };
    std::vector<Expansion> expansions;

    /// States whose outgoing rows perform the simulated (source-visible)
    /// measurements; gadget bookkeeping measurements fire elsewhere. Filled
    /// by lower_same_tape_measurements.
    std::vector<std::string> simulated_measurement_states;

    std::string str() const;
};

struct LoweringResult {
    MachineDefinition machine;
    LoweringReport report;
};

/// Model F -> model G: every head jump of length k is decomposed into the
/// measurement in place followed by k unit moves through fresh states with
/// no-op measurements (which leave the last outcome untouched, so the
/// measured outcome survives the walk). Transitions whose movement is
/// already a unit move pass through unchanged.
LoweringResult lower_movements(const MachineDefinition& m);

enum class LoweringBackend { transfer, teleport };

/// Model A -> model F (transfer backend) or model A -> model E (teleport
/// backend). Two-qubit measurements of same-tape cells expand to: move the
/// first cell's state to the finite tape, measure the observable across the
/// tapes, move it back. The simulated outcome is held in dedicated classical
/// states while the gadget bookkeeping runs and is restored as the driving
/// outcome at gadget exit.
///
/// The single infinite head plays both source heads; the head-to-head offset
/// is tracked through specialized classical states, so the source machine's
/// reachable offset set must be finite (checked, with `offset_cap` bounding
/// the search).
LoweringResult lower_same_tape_measurements(const MachineDefinition& m,
                                            LoweringBackend backend = LoweringBackend::transfer,
                                            std::int64_t offset_cap = 64);

/// Aggregated conformance report of a machine against a resource model.
std::vector<std::string> check_conformance(const MachineDefinition& m, const ResourceModel& model);

}  // namespace mqtm
