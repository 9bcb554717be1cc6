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

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mqtm/analysis.hpp"
#include "mqtm/compiler.hpp"
#include "mqtm/machine.hpp"
#include "mqtm/observable.hpp"
#include "mqtm/programs.hpp"
#include "mqtm/state.hpp"
#include "mqtm/trials.hpp"

namespace mqtm::testing {

inline RegisterState random_qubit_state(CellId cell, std::uint64_t seed) {
    SplitMix64 rng(seed);
    return RegisterState::single(cell, QubitInit::random(rng));
}

inline RegisterState random_product_state(const std::vector<CellId>& cells, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<QubitInit> inits;
    for (std::size_t i = 0; i < cells.size(); i++) inits.push_back(QubitInit::random(rng));
    return RegisterState::product(cells, inits);
}

/// All nonzero branches of one projective measurement, ascending eigenvalue.
struct ProjBranch {
    int outcome;  // +1 / -1 (eigenvalue sign)
    double probability;
    RegisterState post;
};
inline std::vector<ProjBranch> enumerate_measurement(const RegisterState& state,
                                                     const std::string& obs_spelling,
                                                     const std::vector<CellId>& cells) {
    Observable obs = named_observable(obs_spelling);
    std::vector<ProjBranch> out;
    for (const auto& b : obs.branches) {
        auto [p, post] = state.project(b.projector, cells);
        if (p < 1e-15 || !post) continue;
        out.push_back(ProjBranch{b.eigenvalue < 0 ? -1 : +1, p, std::move(*post)});
    }
    return out;
}

/// sigma_x^{(1-o)/2} then sigma_z^{(1-oz)/2} applied to one cell.
inline RegisterState apply_outcome_paulis(RegisterState s, CellId cell, int x_outcome,
                                          int z_outcome = +1) {
    const CellId t[1] = {cell};
    if (x_outcome < 0) s = s.apply(mats::X(), t);
    if (z_outcome < 0) s = s.apply(mats::Z(), t);
    return s;
}

/// Expected intermediate states of the three-measurement state transfer on
/// the register (source j, destination a), for input alpha|0>+beta|1> on j
/// and outcomes i (Z on a), jo (XX), k (Z on j). These are the closed-form
/// states the proofs of the gadget rest on; the simulator must reproduce
/// them branch by branch.
struct TransferCells {
    CellId j, a;
};
inline RegisterState transfer_expected_after_z_dest(const TransferCells& c, cplx alpha, cplx beta,
                                                    int i) {
    std::vector<cplx> base = {alpha, 0, beta, 0};  // (alpha|0>+beta|1>) (x) |0>
    RegisterState s = RegisterState::from_amplitudes({c.j, c.a}, base);
    if (i < 0) s = s.apply(mats::X(), std::vector<CellId>{c.a});
    return s;
}
inline RegisterState transfer_expected_after_xx(const TransferCells& c, cplx alpha, cplx beta,
                                                int i, int jo) {
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<cplx> base = {alpha * r, beta * r, beta * r, alpha * r};
    RegisterState s = RegisterState::from_amplitudes({c.j, c.a}, base);
    s = apply_outcome_paulis(s, c.a, i, jo);
    return s;
}
inline RegisterState transfer_expected_after_z_src(const TransferCells& c, cplx alpha, cplx beta,
                                                   int i, int jo, int k) {
    std::vector<cplx> base = {alpha, beta, 0, 0};  // |0> (x) (alpha|0>+beta|1>)
    RegisterState s = RegisterState::from_amplitudes({c.j, c.a}, base);
    if (k < 0) s = s.apply(mats::X(), std::vector<CellId>{c.j});
    // destination frame: sigma_x^{(1-k)/2} sigma_z^{(1-jo)/2} sigma_x^{(1-i)/2}
    if (i < 0) s = s.apply(mats::X(), std::vector<CellId>{c.a});
    if (jo < 0) s = s.apply(mats::Z(), std::vector<CellId>{c.a});
    if (k < 0) s = s.apply(mats::X(), std::vector<CellId>{c.a});
    return s;
}

/// Expected states along the six-measurement Bell preparation on the
/// register (a, b, c), outcomes i,j,k (initial Z's), l,m (XX's), n (last Z).
struct BellCells {
    CellId a, b, c;
};
inline RegisterState bell_expected_after_zs(const BellCells& c, int i, int j, int k) {
    std::vector<cplx> amps(8, 0);
    amps[0] = 1.0;  // |000>
    RegisterState s = RegisterState::from_amplitudes({c.a, c.b, c.c}, amps);
    s = apply_outcome_paulis(s, c.a, i);
    s = apply_outcome_paulis(s, c.b, j);
    s = apply_outcome_paulis(s, c.c, k);
    return s;
}
inline RegisterState bell_expected_after_xx_ca(const BellCells& c, int i, int j, int k, int l) {
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<cplx> amps(8, 0);
    amps[0b000] = r;  // (|000> + |101>)/sqrt(2) over (a,b,c)
    amps[0b101] = r;
    RegisterState s = RegisterState::from_amplitudes({c.a, c.b, c.c}, amps);
    s = apply_outcome_paulis(s, c.a, i, l);
    s = apply_outcome_paulis(s, c.b, j);
    s = apply_outcome_paulis(s, c.c, k);
    return s;
}
inline RegisterState bell_expected_after_xx_cb(const BellCells& c, int i, int j, int k, int l,
                                               int m) {
    std::vector<cplx> amps(8, 0);
    amps[0b000] = 0.5;
    amps[0b011] = 0.5;
    amps[0b101] = 0.5;
    amps[0b110] = 0.5;
    RegisterState s = RegisterState::from_amplitudes({c.a, c.b, c.c}, amps);
    s = apply_outcome_paulis(s, c.a, i, l);
    s = apply_outcome_paulis(s, c.b, j, m);
    s = apply_outcome_paulis(s, c.c, k);
    return s;
}
/// Pauli frame on (a, b) prescribed for the completed preparation.
inline std::pair<Pauli, Pauli> bell_final_frame(int i, int j, int k, int l, int m, int n) {
    auto bit = [](int o) { return o < 0; };
    Pauli fa{static_cast<bool>(bit(k) ^ bit(i)), bit(l)};
    Pauli fb{static_cast<bool>(bit(n) ^ bit(j)), bit(m)};
    return {fa, fb};
}

inline RegisterState bell_phi_plus(CellId x, CellId y) {
    const double r = 1.0 / std::sqrt(2.0);
    return RegisterState::from_amplitudes({x, y}, {r, 0, 0, r});
}

/// Measured-outcome signature restricted to the given states (used to pick
/// the simulated measurements out of a lowered machine's trace).
inline std::string filtered_signature(const MachineDefinition& m,
                                      const std::vector<TraceStep>& trace,
                                      const std::set<std::string>& states) {
    std::string s;
    for (const TraceStep& ts : trace) {
        if (!ts.measured) continue;
        if (!states.count(m.state_names[ts.state_before])) continue;
        s += ts.outcome.v[0] > 0 ? '+' : '-';
    }
    return s;
}

/// Distribution over (halted, outcome signature) with the final state kept
/// per signature for cross-machine fidelity checks.
struct MarginalEntry {
    double mass = 0;
    bool halted = false;
    RegisterState state;  // restricted to the listed cells, renamed
    bool has_state = false;
    // branches sharing a signature must agree on the visible state
    double internal_fidelity = 1.0;
};

/// Restricts each branch's final register to the renamed cells (which must
/// factor out) and aggregates mass per (halt flag, signature). Streams the
/// enumeration, so it works on trees too large to hold.
struct Marginal {
    std::map<std::string, MarginalEntry> entries;
    double pruned_mass = 0;
};
inline void accumulate_marginal(Marginal& out, const MachineDefinition& m, const Branch& b,
                                const std::set<std::string>& signature_states,
                                const std::map<CellId, CellId>& rename);

inline Marginal branch_marginal(const MachineDefinition& m, const RegisterState& input,
                                const BranchOptions& opts,
                                const std::set<std::string>& signature_states,
                                const std::map<CellId, CellId>& rename) {
    Marginal out;
    out.pruned_mass = branch_tree_visit(m, input, opts, [&](Branch&& b) {
        accumulate_marginal(out, m, b, signature_states, rename);
    });
    return out;
}

inline Marginal marginal_of_tree(const MachineDefinition& m, const BranchTree& tree,
                                 const std::set<std::string>& signature_states,
                                 const std::map<CellId, CellId>& rename) {
    Marginal out;
    out.pruned_mass = tree.pruned_mass;
    for (const Branch& b : tree.branches)
        accumulate_marginal(out, m, b, signature_states, rename);
    return out;
}

inline void accumulate_marginal(Marginal& out, const MachineDefinition& m, const Branch& b,
                                const std::set<std::string>& signature_states,
                                const std::map<CellId, CellId>& rename) {
    {
        std::string key = (b.result.halted ? "H:" : "R:") +
                          filtered_signature(m, b.result.trace, signature_states);
        MarginalEntry& e = out.entries[key];
        e.mass += b.probability;
        e.halted = b.result.halted;
        std::vector<CellId> keep;
        for (const CellId& c : b.result.final_config.state.cells())
            if (rename.count(c)) keep.push_back(c);
        auto fac = factor_cells(b.result.final_config.state, keep);
        if (fac) {
            std::vector<CellId> renamed;
            for (const CellId& c : keep) renamed.push_back(rename.at(c));
            RegisterState restricted = RegisterState::from_amplitudes(renamed, fac->amplitudes());
            if (!e.has_state) {
                e.state = std::move(restricted);
                e.has_state = true;
            } else {
                e.internal_fidelity =
                    std::min(e.internal_fidelity, RegisterState::fidelity(e.state, restricted));
            }
        }
    }
}

inline std::set<std::string> all_state_names(const MachineDefinition& m) {
    return std::set<std::string>(m.state_names.begin(), m.state_names.end());
}

}  // namespace mqtm::testing
