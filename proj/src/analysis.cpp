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

#include "mqtm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "mqtm/detail/jacobi.hpp"

namespace mqtm {

Bipartition Bipartition::of(const RegisterState& state, std::vector<CellId> left_cells) {
    std::set<CellId> left_set(left_cells.begin(), left_cells.end());
    if (left_set.size() != left_cells.size())
        throw std::invalid_argument("bipartition: duplicate cell on the left side");
    Bipartition cut;
    cut.left = std::move(left_cells);
    for (const CellId& c : state.cells())
        if (!left_set.count(c)) cut.right.push_back(c);
    for (const CellId& c : cut.left)
        if (!state.has_cell(c))
            throw std::invalid_argument("bipartition: cell " + c.str() + " not in the register");
    return cut;
}

namespace {

// Reshapes the (reordered) amplitude vector into a matrix and computes the
// squared singular values by one-sided Jacobi on the smaller side's columns.
// Working on the matrix itself (not its Gram matrix) keeps the numerical
// floor of a "zero" singular value near machine epsilon, well below the
// rank threshold.
std::vector<double> squared_singular_values(const RegisterState& state, const Bipartition& cut) {
    std::vector<CellId> order = cut.left;
    order.insert(order.end(), cut.right.begin(), cut.right.end());
    if (order.size() != state.cells().size())
        throw std::invalid_argument("bipartition does not cover the register");
    RegisterState s = state.reorder(order);

    const std::size_t rows = std::size_t{1} << cut.left.size();
    const std::size_t cols = std::size_t{1} << cut.right.size();
    const auto& a = s.amplitudes();

    const bool left_small = rows <= cols;
    const std::size_t n = left_small ? rows : cols;
    const std::size_t len = left_small ? cols : rows;
    std::vector<std::vector<cplx>> col(n, std::vector<cplx>(len));
    for (std::size_t r = 0; r < rows; r++)
        for (std::size_t c = 0; c < cols; c++) {
            if (left_small)
                col[r][c] = a[r * cols + c];
            else
                col[c][r] = a[r * cols + c];
        }

    for (int sweep = 0; sweep < 60; sweep++) {
        double off = 0;
        for (std::size_t i = 0; i < n; i++) {
            for (std::size_t j = i + 1; j < n; j++) {
                cplx cij(0, 0);
                double aii = 0, ajj = 0;
                for (std::size_t k = 0; k < len; k++) {
                    cij += std::conj(col[i][k]) * col[j][k];
                    aii += std::norm(col[i][k]);
                    ajj += std::norm(col[j][k]);
                }
                if (std::norm(cij) < 1e-64) continue;
                off += std::norm(cij);
                Matrix g(2);
                g.at(0, 0) = aii;
                g.at(0, 1) = cij;
                g.at(1, 0) = std::conj(cij);
                g.at(1, 1) = ajj;
                Matrix v = detail::jacobi_hermitian(g).vectors;
                for (std::size_t k = 0; k < len; k++) {
                    cplx u = col[i][k], w = col[j][k];
                    col[i][k] = v.at(0, 0) * u + v.at(1, 0) * w;
                    col[j][k] = v.at(0, 1) * u + v.at(1, 1) * w;
                }
            }
        }
        if (off < 1e-40) break;
    }

    std::vector<double> evs;
    for (std::size_t i = 0; i < n; i++) {
        double s2 = 0;
        for (std::size_t k = 0; k < len; k++) s2 += std::norm(col[i][k]);
        evs.push_back(s2);
    }
    std::sort(evs.begin(), evs.end());
    return evs;
}

}  // namespace

int schmidt_rank(const RegisterState& state, const Bipartition& cut, double threshold) {
    if (cut.left.empty() || cut.right.empty()) return 1;
    auto evs = squared_singular_values(state, cut);
    int rank = 0;
    for (double ev : evs)
        if (ev > threshold * threshold) rank++;
    return std::max(rank, 1);
}

bool is_fully_product(const RegisterState& state, double threshold) {
    for (const CellId& c : state.cells()) {
        Bipartition cut = Bipartition::of(state, {c});
        if (schmidt_rank(state, cut, threshold) != 1) return false;
    }
    return true;
}

std::optional<RegisterState> factor_cells(const RegisterState& state,
                                          const std::vector<CellId>& cells, double threshold) {
    if (cells.empty()) return RegisterState();
    if (cells.size() == state.cells().size()) return state.reorder(cells);

    Bipartition cut = Bipartition::of(state, cells);
    if (schmidt_rank(state, cut, threshold) != 1) return std::nullopt;

    std::vector<CellId> order = cut.left;
    order.insert(order.end(), cut.right.begin(), cut.right.end());
    RegisterState s = state.reorder(order);
    const std::size_t rows = std::size_t{1} << cells.size();
    const std::size_t cols = s.amplitudes().size() / rows;
    const auto& a = s.amplitudes();

    // Rank-1 amplitude matrix: any nonzero column is the left factor.
    std::size_t best_col = 0;
    double best = -1;
    for (std::size_t c = 0; c < cols; c++) {
        double n = 0;
        for (std::size_t r = 0; r < rows; r++) n += std::norm(a[r * cols + c]);
        if (n > best) {
            best = n;
            best_col = c;
        }
    }
    std::vector<cplx> left(rows);
    double n2 = 0;
    for (std::size_t r = 0; r < rows; r++) {
        left[r] = a[r * cols + best_col];
        n2 += std::norm(left[r]);
    }
    double n = std::sqrt(n2);
    for (auto& v : left) v /= n;
    return RegisterState::from_amplitudes(cells, std::move(left));
}

std::optional<PauliFrame> identify_pauli_frame(const RegisterState& state,
                                               const RegisterState& reference,
                                               const std::vector<CellId>& cells, double tol) {
    const std::size_t n = cells.size();
    const Pauli order[4] = {Pauli{false, false}, Pauli{true, false}, Pauli{true, true},
                            Pauli{false, true}};  // I, X, Y, Z
    std::vector<std::size_t> digits(n, 0);
    const std::size_t total = std::size_t{1} << (2 * n);
    for (std::size_t it = 0; it < total; it++) {
        std::size_t v = it;
        RegisterState candidate = state;
        PauliFrame frame;
        for (std::size_t q = 0; q < n; q++) {
            Pauli p = order[v & 3];
            v >>= 2;
            if (p.is_identity()) continue;
            frame.mul(cells[q], p);
            const CellId targets[1] = {cells[q]};
            candidate = candidate.apply(p.matrix(), targets);
        }
        if (RegisterState::fidelity(candidate, reference) >= 1.0 - tol) return frame;
    }
    return std::nullopt;
}

}  // namespace mqtm
