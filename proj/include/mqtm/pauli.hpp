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
#include <string>

#include "mqtm/cell.hpp"
#include "mqtm/linalg.hpp"

namespace mqtm {

/// Single-qubit Pauli with the global phase discarded: P = X^x Z^z.
/// Multiplication is exponent-wise xor, so the group law is that of
/// the Pauli group modulo phase.
struct Pauli {
    bool x = false;
    bool z = false;

    auto operator<=>(const Pauli&) const = default;

    Pauli operator*(const Pauli& o) const { return Pauli{x != o.x, z != o.z}; }
    bool is_identity() const { return !x && !z; }

    char letter() const {
        if (!x && !z) return 'I';
        if (x && !z) return 'X';
        if (x && z) return 'Y';
        return 'Z';
    }

    Matrix matrix() const {
        Matrix m = Matrix::identity(2);
        if (x) m = mats::X() * m;
        if (z) m = mats::Z() * m;
        return m;
    }

    static Pauli from_letter(char c) {
        switch (c) {
            case 'I': return {false, false};
            case 'X': return {true, false};
            case 'Y': return {true, true};
            case 'Z': return {false, true};
        }
        throw std::invalid_argument(std::string("not a Pauli letter: ") + c);
    }
};

/// Known Pauli byproduct per cell, accumulated from measurement outcomes.
struct PauliFrame {
    std::map<CellId, Pauli> tags;

    Pauli get(CellId c) const {
        auto it = tags.find(c);
        return it == tags.end() ? Pauli{} : it->second;
    }
    void mul(CellId c, Pauli p) {
        Pauli r = get(c) * p;
        if (r.is_identity())
            tags.erase(c);
        else
            tags[c] = r;
    }
    bool is_identity() const { return tags.empty(); }

    std::string str() const {
        std::string s;
        for (const auto& [c, p] : tags) {
            if (!s.empty()) s += " ";
            s += c.str() + "=" + p.letter();
        }
        return s.empty() ? "I" : s;
    }
};

}  // namespace mqtm
