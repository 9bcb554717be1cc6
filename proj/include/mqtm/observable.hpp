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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mqtm/linalg.hpp"

namespace mqtm {

inline constexpr double kProjectorTolerance = 1e-10;
inline constexpr double kEigenvalueMergeTolerance = 1e-8;

/// Classical outcome symbol: a k-tuple over {-1,+1}. Scalar measurement
/// outcomes occupy slot 0; remaining slots are padded with +1 so that the
/// alphabet always has 2^k symbols.
struct OutcomeTag {
    int k = 1;
    std::array<std::int8_t, 2> v{+1, +1};

    static OutcomeTag all_plus(int k) {
        OutcomeTag t;
        t.k = k;
        return t;
    }
    static OutcomeTag scalar(double eigenvalue, int k) {
        OutcomeTag t = all_plus(k);
        t.v[0] = eigenvalue < 0 ? -1 : +1;
        return t;
    }

    auto operator<=>(const OutcomeTag&) const = default;

    /// Dense index in [0, 2^k): slot values +1 map to bit 1.
    int index() const {
        int idx = 0;
        for (int i = 0; i < k; i++) idx |= (v[i] > 0 ? 1 : 0) << (k - 1 - i);
        return idx;
    }
    static OutcomeTag from_index(int idx, int k) {
        OutcomeTag t = all_plus(k);
        for (int i = 0; i < k; i++) t.v[i] = ((idx >> (k - 1 - i)) & 1) ? +1 : -1;
        return t;
    }

    std::string str() const {
        std::string s = "(";
        for (int i = 0; i < k; i++) {
            if (i) s += ",";
            s += v[i] > 0 ? "+1" : "-1";
        }
        return s + ")";
    }
    /// Accepts "(+1,-1)", "(+1)", "+1", "-1".
    static OutcomeTag parse(const std::string& text, int k);
};

struct ObservableBranch {
    double eigenvalue = 0;
    Matrix projector;
};

/// Hermitian observable stored as its spectral decomposition. Branches are
/// kept in ascending eigenvalue order; measuring yields the eigenvalue of
/// the sampled branch as the classical outcome.
struct Observable {
    std::string name;
    int arity = 1;
    std::vector<ObservableBranch> branches;

    /// Measurement shortcuts, filled by spectral_decompose so the hot
    /// simulation path does not rediscover them per step. Hand-assembled
    /// observables may leave them unset; the queries below then fall back
    /// to computing from the branches.
    bool plan_ready = false;
    bool plan_noop = false;
    struct FactorPlan {
        int slot;  // 0 = first tensor factor, 1 = second
        std::vector<ObservableBranch> branches;  // reduced one-qubit projectors
    };
    std::optional<FactorPlan> plan_factor;

    /// Reassembles sum_m m P_m.
    Matrix matrix() const;

    /// True for the do-nothing observables I and II: a single +1 branch
    /// whose projector is the identity. Measuring them is skipped entirely.
    bool is_noop() const;

    /// For two-qubit observables of the form A (x) I or I (x) B, the factor
    /// that actually acts and which slot it occupies; nullopt when both
    /// factors are nontrivial (or arity is 1).
    struct SingleFactor {
        int slot;  // 0 = first tensor factor, 1 = second
        Matrix op;
    };
    std::optional<SingleFactor> single_factor() const;

    OutcomeTag tag_for_branch(int branch, int k) const {
        return OutcomeTag::scalar(branches[branch].eigenvalue, k);
    }
};

/// Spectral decomposition of a hermitian matrix. Supports the closed forms
/// that cover every observable used here: diagonal matrices, and involutions
/// (M^2 = I) which decompose as (I +- M)/2. Eigenvalues closer than the
/// merge tolerance share one degenerate branch.
Observable spectral_decompose(const Matrix& m, const std::string& name = "");

/// Observable for one of the canonical spellings:
///   X Y Z I XX ZZ XZ ZX XI ZI IX IZ II XX+YX XX+XY
/// ("XX+YX" and "XX+XY" denote the 1/sqrt(2)-scaled sums).
Observable named_observable(const std::string& spelling);
bool is_observable_spelling(const std::string& spelling);

struct ObservableSet {
    std::string name;
    std::vector<Observable> members;
    const Observable* find(const std::string& spelling) const;
};

/// The observable table of resource model A..G.
ObservableSet named_set(char model);

/// Empty when the observable satisfies all structural rules: hermitian
/// idempotent projectors, pairwise orthogonal, completing to the identity,
/// and reassembling the defining matrix.
std::vector<std::string> validate(const Observable& obs);

}  // namespace mqtm
