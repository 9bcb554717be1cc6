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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mqtm/cell.hpp"
#include "mqtm/kernels.hpp"
#include "mqtm/linalg.hpp"

namespace mqtm {

inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kAmplitudeTruncation = 1e-12;
inline constexpr int kDefaultMaxQubits = 14;

/// One-qubit product-state factor used to initialize fresh cells.
struct QubitInit {
    cplx a0{1, 0};
    cplx a1{0, 0};

    static QubitInit zero() { return {}; }
    static QubitInit one() { return {cplx(0, 0), cplx(1, 0)}; }
    static QubitInit of(cplx a0, cplx a1);
    /// Haar-like random qubit from a deterministic stream.
    static QubitInit random(SplitMix64& rng);
};

/// Normalized amplitude vector over an ordered list of visited cells.
/// cells()[0] is the most significant bit of an amplitude index, so the
/// amplitude of |b0 b1 ... b_{n-1}> lives at index (b0 b1 ... b_{n-1})_2.
/// Operations return new values; a constructed state is never mutated.
class RegisterState {
  public:
    /// Zero-qubit register: a single unit amplitude, ready to be extended.
    RegisterState() : amps_{cplx(1, 0)} {}

    static RegisterState single(CellId cell, const QubitInit& init = QubitInit::zero());
    static RegisterState product(std::span<const CellId> cells,
                                 std::span<const QubitInit> inits);
    static RegisterState from_amplitudes(std::vector<CellId> cells, std::vector<cplx> amps);

    int num_cells() const { return static_cast<int>(cells_.size()); }
    const std::vector<CellId>& cells() const { return cells_; }
    const std::vector<cplx>& amplitudes() const { return amps_; }
    bool has_cell(CellId c) const;
    /// Throws if the cell is not part of the register.
    int position_of(CellId c) const;

    double norm() const;

    /// Tensor-extends with fresh cells appended after the existing order.
    RegisterState extend(std::span<const CellId> new_cells, const QubitInit& init,
                         int max_qubits = kDefaultMaxQubits) const;
    RegisterState extend(std::span<const CellId> new_cells,
                         std::span<const QubitInit> inits,
                         int max_qubits = kDefaultMaxQubits) const;

    /// Applies op to the listed cells (identity on the rest).
    RegisterState apply(const Matrix& op, std::span<const CellId> targets) const;

    /// Reorders the tensor factors; new_order must be a permutation of cells().
    RegisterState reorder(std::span<const CellId> new_order) const;

    /// |<a|b>| after reordering b into a's cell order. 1 iff equal up to
    /// global phase. Throws when the cell sets differ.
    static double fidelity(const RegisterState& a, const RegisterState& b);

    /// Applies a projector to the listed cells. Returns the branch
    /// probability and, when it is non-negligible, the renormalized
    /// post-state (with tiny amplitudes truncated to exact zero).
    std::pair<double, std::optional<RegisterState>> project(const Matrix& projector,
                                                            std::span<const CellId> targets) const;

    std::string str() const;

  private:
    std::vector<cplx> amps_;
    std::vector<CellId> cells_;

    std::vector<int> shifts_for(std::span<const CellId> targets) const;
};

}  // namespace mqtm
