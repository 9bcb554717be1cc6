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

#include "mqtm/state.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mqtm {

QubitInit QubitInit::of(cplx a0, cplx a1) {
    double n = std::sqrt(std::norm(a0) + std::norm(a1));
    if (n < 1e-12) throw std::invalid_argument("qubit init has zero norm");
    return {a0 / n, a1 / n};
}

QubitInit QubitInit::random(SplitMix64& rng) {
    // Box-Muller pairs; normalizing a complex Gaussian vector gives a
    // uniform state on the Bloch sphere.
    auto gauss = [&rng]() {
        double u1 = rng.next_double();
        double u2 = rng.next_double();
        u1 = std::max(u1, 1e-300);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    };
    cplx a0(gauss(), gauss());
    cplx a1(gauss(), gauss());
    if (std::abs(a0) + std::abs(a1) < 1e-9) a0 = 1.0;
    return QubitInit::of(a0, a1);
}

RegisterState RegisterState::single(CellId cell, const QubitInit& init) {
    RegisterState s;
    const CellId cells[1] = {cell};
    const QubitInit inits[1] = {init};
    return s.extend(std::span<const CellId>(cells), std::span<const QubitInit>(inits));
}

RegisterState RegisterState::product(std::span<const CellId> cells,
                                     std::span<const QubitInit> inits) {
    RegisterState s;
    return s.extend(cells, inits);
}

RegisterState RegisterState::from_amplitudes(std::vector<CellId> cells, std::vector<cplx> amps) {
    if (amps.size() != (std::size_t{1} << cells.size()))
        throw std::invalid_argument("from_amplitudes: length must be 2^(cell count)");
    std::set<CellId> uniq(cells.begin(), cells.end());
    if (uniq.size() != cells.size())
        throw std::invalid_argument("from_amplitudes: duplicate cell id");
    RegisterState s;
    s.cells_ = std::move(cells);
    s.amps_ = std::move(amps);
    double n = s.norm();
    if (std::abs(n - 1.0) > 1e-6)
        throw std::invalid_argument("from_amplitudes: vector is not normalized");
    kernels::scale(s.amps_, 1.0 / n, kernels::default_exec());
    return s;
}

bool RegisterState::has_cell(CellId c) const {
    return std::find(cells_.begin(), cells_.end(), c) != cells_.end();
}

int RegisterState::position_of(CellId c) const {
    auto it = std::find(cells_.begin(), cells_.end(), c);
    if (it == cells_.end())
        throw std::invalid_argument("unknown cell " + c.str() + " in register");
    return static_cast<int>(it - cells_.begin());
}

double RegisterState::norm() const {
    return std::sqrt(kernels::norm_squared(amps_, kernels::default_exec()));
}

RegisterState RegisterState::extend(std::span<const CellId> new_cells, const QubitInit& init,
                                    int max_qubits) const {
    std::vector<QubitInit> inits(new_cells.size(), init);
    return extend(new_cells, std::span<const QubitInit>(inits), max_qubits);
}

RegisterState RegisterState::extend(std::span<const CellId> new_cells,
                                    std::span<const QubitInit> inits, int max_qubits) const {
    if (new_cells.size() != inits.size())
        throw std::invalid_argument("extend: one init required per new cell");
    if (new_cells.empty()) return *this;

    std::set<CellId> seen(cells_.begin(), cells_.end());
    for (const CellId& c : new_cells)
        if (!seen.insert(c).second)
            throw std::invalid_argument("extend: duplicate cell " + c.str());

    const std::size_t total = cells_.size() + new_cells.size();
    if (total > static_cast<std::size_t>(max_qubits))
        throw std::runtime_error("register cap exceeded: " + std::to_string(total) +
                                 " cells, cap " + std::to_string(max_qubits));

    // Tensor factors of the appended cells, built small-to-large.
    std::vector<cplx> tail{cplx(1, 0)};
    for (std::size_t q = 0; q < new_cells.size(); q++) {
        std::vector<cplx> next(tail.size() * 2);
        for (std::size_t i = 0; i < tail.size(); i++) {
            next[2 * i] = tail[i] * inits[q].a0;
            next[2 * i + 1] = tail[i] * inits[q].a1;
        }
        tail = std::move(next);
    }

    RegisterState out;
    out.cells_ = cells_;
    out.cells_.insert(out.cells_.end(), new_cells.begin(), new_cells.end());
    out.amps_.assign(amps_.size() * tail.size(), cplx(0, 0));
    for (std::size_t i = 0; i < amps_.size(); i++) {
        if (amps_[i] == cplx(0, 0)) continue;
        for (std::size_t j = 0; j < tail.size(); j++) out.amps_[i * tail.size() + j] = amps_[i] * tail[j];
    }
    return out;
}

std::vector<int> RegisterState::shifts_for(std::span<const CellId> targets) const {
    const int n = num_cells();
    std::vector<int> shifts;
    shifts.reserve(targets.size());
    std::set<CellId> uniq;
    for (const CellId& c : targets) {
        if (!uniq.insert(c).second)
            throw std::invalid_argument("repeated target cell " + c.str());
        shifts.push_back(n - 1 - position_of(c));
    }
    return shifts;
}

RegisterState RegisterState::apply(const Matrix& op, std::span<const CellId> targets) const {
    if (op.num_qubits() != static_cast<int>(targets.size()))
        throw std::invalid_argument("apply: operator arity " + std::to_string(op.num_qubits()) +
                                    " does not match " + std::to_string(targets.size()) +
                                    " target cells");
    RegisterState out = *this;
    kernels::apply_matrix(out.amps_, op, shifts_for(targets), kernels::default_exec());
    return out;
}

RegisterState RegisterState::reorder(std::span<const CellId> new_order) const {
    if (new_order.size() != cells_.size())
        throw std::invalid_argument("reorder: order must list every cell exactly once");
    const int n = num_cells();
    // Destination bit j (from lsb) corresponds to new_order[n-1-j].
    std::vector<int> src_shift(n);
    std::set<CellId> uniq;
    for (int pos = 0; pos < n; pos++) {
        const CellId& c = new_order[pos];
        if (!uniq.insert(c).second)
            throw std::invalid_argument("reorder: duplicate cell " + c.str());
        src_shift[n - 1 - pos] = n - 1 - position_of(c);
    }
    RegisterState out;
    out.cells_.assign(new_order.begin(), new_order.end());
    kernels::permute_gather(amps_, out.amps_, src_shift, kernels::default_exec());
    return out;
}

double RegisterState::fidelity(const RegisterState& a, const RegisterState& b) {
    if (a.cells_.size() != b.cells_.size())
        throw std::invalid_argument("fidelity: registers cover different cell sets");
    for (const CellId& c : a.cells_)
        if (!b.has_cell(c))
            throw std::invalid_argument("fidelity: cell " + c.str() + " missing from second state");
    RegisterState bb = b.reorder(a.cells_);
    return std::abs(kernels::inner_product(a.amps_, bb.amps_, kernels::default_exec()));
}

std::pair<double, std::optional<RegisterState>> RegisterState::project(
    const Matrix& projector, std::span<const CellId> targets) const {
    RegisterState out = *this;
    kernels::apply_matrix(out.amps_, projector, shifts_for(targets), kernels::default_exec());
    double p = kernels::norm_squared(out.amps_, kernels::default_exec());
    if (p < 1e-24) return {0.0, std::nullopt};
    kernels::truncate_below(out.amps_, kAmplitudeTruncation, kernels::default_exec());
    double n2 = kernels::norm_squared(out.amps_, kernels::default_exec());
    kernels::scale(out.amps_, 1.0 / std::sqrt(n2), kernels::default_exec());
    return {p, std::move(out)};
}

std::string RegisterState::str() const {
    std::ostringstream os;
    os.precision(6);
    bool first = true;
    for (std::size_t i = 0; i < amps_.size(); i++) {
        if (std::abs(amps_[i]) < 1e-9) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << amps_[i].real() << (amps_[i].imag() < 0 ? "-" : "+")
           << std::abs(amps_[i].imag()) << "i)|";
        for (int q = 0; q < num_cells(); q++) os << ((i >> (num_cells() - 1 - q)) & 1);
        os << ">";
    }
    if (first) os << "0";
    return os.str();
}

}  // namespace mqtm
