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

#include "mqtm/trials.hpp"

#include <cmath>

namespace mqtm {

std::string trace_signature(const std::vector<TraceStep>& trace) {
    std::string s;
    for (const TraceStep& ts : trace) {
        if (!ts.measured) continue;
        s += ts.outcome.v[0] > 0 ? '+' : '-';
    }
    return s;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::int64_t index) {
    return mix64(base_seed, 0x747269616C73ULL + static_cast<std::uint64_t>(index));
}

TrialStats run_trials(const MachineDefinition& m, const RegisterState& input, std::int64_t n,
                      std::uint64_t base_seed, const RunOptions& opts, const BranchTree* exact) {
    if (n < 1) throw std::invalid_argument("trial count must be at least 1");

    std::vector<char> halted(n, 0);
    std::vector<std::int64_t> steps(n, 0);
    std::vector<std::string> outcome(n);
    std::vector<std::string> signature(n);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (std::int64_t i = 0; i < n; i++) {
        RunOptions o = opts;
        o.seed = trial_seed(base_seed, i);
        RunResult r = run(m, input, o);
        halted[i] = r.halted ? 1 : 0;
        steps[i] = r.final_config.step_count;
        outcome[i] = r.final_config.last_outcome.str();
        signature[i] = trace_signature(r.trace);
    }

    TrialStats stats;
    stats.trials = n;
    double halted_count = 0, sum = 0, sum2 = 0;
    for (std::int64_t i = 0; i < n; i++) {
        halted_count += halted[i];
        sum += static_cast<double>(steps[i]);
        sum2 += static_cast<double>(steps[i]) * static_cast<double>(steps[i]);
        if (halted[i]) stats.outcome_histogram[outcome[i]]++;
    }
    stats.halted_fraction = halted_count / static_cast<double>(n);
    stats.steps_mean = sum / static_cast<double>(n);
    double var = sum2 / static_cast<double>(n) - stats.steps_mean * stats.steps_mean;
    stats.steps_stddev = var > 0 ? std::sqrt(var) : 0.0;
    stats.steps_per_trial = std::move(steps);
    stats.signatures_per_trial = signature;

    if (exact) {
        std::map<std::string, double> exact_p;
        for (const Branch& b : exact->branches)
            exact_p[trace_signature(b.result.trace)] += b.probability;
        std::map<std::string, std::int64_t> counts;
        for (const auto& s : signature) counts[s]++;
        for (const auto& [sig, p] : exact_p) {
            TrialStats::BranchProbe probe;
            probe.signature = sig;
            probe.exact = p;
            auto it = counts.find(sig);
            probe.empirical =
                it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(n);
            stats.branch_compare.push_back(probe);
        }
    }
    return stats;
}

}  // namespace mqtm
