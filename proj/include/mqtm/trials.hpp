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
#include <map>
#include <string>
#include <vector>

#include "mqtm/machine.hpp"

namespace mqtm {

/// Outcome sequence of the measured steps, e.g. "+-+". No-op steps are
/// skipped so lowered machines compare against their sources directly.
std::string trace_signature(const std::vector<TraceStep>& trace);

/// Seed for trial `index`, derived so parallel and sequential execution of
/// a batch produce identical statistics.
std::uint64_t trial_seed(std::uint64_t base_seed, std::int64_t index);

struct TrialStats {
    std::int64_t trials = 0;
    double halted_fraction = 0;
    std::map<std::string, std::int64_t> outcome_histogram;  // final outcome at halt
    double steps_mean = 0;
    double steps_stddev = 0;

    struct BranchProbe {
        std::string signature;
        double exact = 0;
        double empirical = 0;
    };
    std::vector<BranchProbe> branch_compare;  // present when an exact tree was supplied

    std::vector<std::int64_t> steps_per_trial;
    std::vector<std::string> signatures_per_trial;
};

/// Runs n independent seeded simulations (trials may execute in parallel;
/// aggregation is positional, so thread count cannot change the result).
TrialStats run_trials(const MachineDefinition& m, const RegisterState& input, std::int64_t n,
                      std::uint64_t base_seed, const RunOptions& opts,
                      const BranchTree* exact = nullptr);

}  // namespace mqtm
