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

#include <optional>
#include <vector>

#include "mqtm/pauli.hpp"
#include "mqtm/state.hpp"

namespace mqtm {

inline constexpr double kSchmidtThreshold = 1e-8;
inline constexpr double kFrameFidelityTolerance = 1e-8;

/// Split of a register's cells into two disjoint sides covering everything.
struct Bipartition {
    std::vector<CellId> left;
    std::vector<CellId> right;

    static Bipartition of(const RegisterState& state, std::vector<CellId> left_cells);
};

/// Number of singular values of the amplitude matrix (reshaped along the
/// cut) above the threshold. 1 iff the state factorizes across the cut.
int schmidt_rank(const RegisterState& state, const Bipartition& cut,
                 double threshold = kSchmidtThreshold);

/// True iff every single-cell-vs-rest cut has Schmidt rank 1.
bool is_fully_product(const RegisterState& state, double threshold = kSchmidtThreshold);

/// The given cells factored out as their own register, when the state is a
/// product across that cut; nullopt otherwise.
std::optional<RegisterState> factor_cells(const RegisterState& state,
                                          const std::vector<CellId>& cells,
                                          double threshold = kSchmidtThreshold);

/// Searches the 4^n per-cell Pauli tensors for one mapping `state` onto
/// `reference` up to global phase (identity-first order, so ties prefer I).
std::optional<PauliFrame> identify_pauli_frame(const RegisterState& state,
                                               const RegisterState& reference,
                                               const std::vector<CellId>& cells,
                                               double tol = kFrameFidelityTolerance);

}  // namespace mqtm
