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

#include "mqtm/observable.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mqtm {

OutcomeTag OutcomeTag::parse(const std::string& text, int k) {
    std::string t = text;
    if (!t.empty() && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
    OutcomeTag tag = all_plus(k);
    int slot = 0;
    std::size_t pos = 0;
    while (pos < t.size()) {
        std::size_t comma = t.find(',', pos);
        std::string part = t.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (slot >= k) throw std::invalid_argument("outcome tag has too many slots: " + text);
        if (part == "+1" || part == "1" || part == "+")
            tag.v[slot] = +1;
        else if (part == "-1" || part == "-")
            tag.v[slot] = -1;
        else
            throw std::invalid_argument("bad outcome slot '" + part + "' in " + text);
        slot++;
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (slot != k)
        throw std::invalid_argument("outcome tag " + text + " has " + std::to_string(slot) +
                                    " slots, machine expects " + std::to_string(k));
    return tag;
}

Matrix Observable::matrix() const {
    if (branches.empty()) throw std::invalid_argument("observable has no branches");
    Matrix m(branches[0].projector.dim);
    for (const auto& b : branches) m = m + b.projector.scaled(b.eigenvalue);
    return m;
}

bool Observable::is_noop() const {
    return branches.size() == 1 && branches[0].eigenvalue > 0 &&
           branches[0].projector.is_identity(kProjectorTolerance);
}

std::optional<Observable::SingleFactor> Observable::single_factor() const {
    if (arity != 2) return std::nullopt;
    Matrix m = matrix();
    // Try M = A (x) I: A_{ij} = M_{2i,2j}, then check the reconstruction.
    Matrix a(2), b(2);
    for (int i = 0; i < 2; i++)
        for (int j = 0; j < 2; j++) {
            a.at(i, j) = m.at(2 * i, 2 * j);
            b.at(i, j) = m.at(i, j);
        }
    if (Matrix::kron(a, Matrix::identity(2)).approx_equal(m, kProjectorTolerance))
        return SingleFactor{0, a};
    if (Matrix::kron(Matrix::identity(2), b).approx_equal(m, kProjectorTolerance))
        return SingleFactor{1, b};
    return std::nullopt;
}

namespace {
void fill_measurement_plan(Observable& obs) {
    obs.plan_noop = obs.is_noop();
    obs.plan_factor.reset();
    if (obs.arity == 2 && !obs.plan_noop) {
        if (auto sf = obs.single_factor()) {
            Observable reduced = spectral_decompose(sf->op, obs.name + "[factor]");
            if (reduced.branches.size() == obs.branches.size()) {
                Observable::FactorPlan plan;
                plan.slot = sf->slot;
                for (std::size_t b = 0; b < obs.branches.size(); b++) {
                    if (std::abs(reduced.branches[b].eigenvalue - obs.branches[b].eigenvalue) >
                        1e-9)
                        return;  // keep the full-matrix path
                    plan.branches.push_back(reduced.branches[b]);
                }
                obs.plan_factor = std::move(plan);
            }
        }
    }
    obs.plan_ready = true;
}
}  // namespace

Observable spectral_decompose(const Matrix& m, const std::string& name) {
    if (!m.is_hermitian(kProjectorTolerance))
        throw std::invalid_argument("spectral_decompose: matrix is not hermitian" +
                                    (name.empty() ? "" : " (" + name + ")"));
    Observable obs;
    obs.name = name;
    obs.arity = m.num_qubits();

    bool diagonal = true;
    for (int i = 0; i < m.dim && diagonal; i++)
        for (int j = 0; j < m.dim; j++)
            if (i != j && std::abs(m.at(i, j)) > 1e-12) {
                diagonal = false;
                break;
            }

    if (diagonal) {
        // Cluster the diagonal entries into degenerate branches.
        std::vector<std::pair<double, std::vector<int>>> clusters;
        for (int i = 0; i < m.dim; i++) {
            double ev = m.at(i, i).real();
            bool found = false;
            for (auto& [val, idxs] : clusters)
                if (std::abs(val - ev) <= kEigenvalueMergeTolerance) {
                    idxs.push_back(i);
                    found = true;
                    break;
                }
            if (!found) clusters.push_back({ev, {i}});
        }
        std::sort(clusters.begin(), clusters.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        for (const auto& [ev, idxs] : clusters) {
            ObservableBranch b;
            b.eigenvalue = ev;
            b.projector = Matrix(m.dim);
            for (int i : idxs) b.projector.at(i, i) = 1.0;
            obs.branches.push_back(std::move(b));
        }
        fill_measurement_plan(obs);
        return obs;
    }

    if ((m * m).is_identity(kProjectorTolerance)) {
        // Involution: eigenvalues +-1 with projectors (I +- M)/2.
        Matrix id = Matrix::identity(m.dim);
        Matrix plus = (id + m).scaled(0.5);
        Matrix minus = (id - m).scaled(0.5);
        if (std::abs(minus.trace()) > 0.5) obs.branches.push_back({-1.0, minus});
        if (std::abs(plus.trace()) > 0.5) obs.branches.push_back({+1.0, plus});
        fill_measurement_plan(obs);
        return obs;
    }

    throw std::invalid_argument(
        "spectral_decompose: only diagonal matrices and involutions (M^2 = I) are supported" +
        (name.empty() ? "" : " (" + name + ")"));
}

namespace {

Matrix matrix_for_spelling(const std::string& s) {
    auto one = [](char c) -> Matrix {
        switch (c) {
            case 'I': return mats::I();
            case 'X': return mats::X();
            case 'Y': return mats::Y();
            case 'Z': return mats::Z();
        }
        throw std::invalid_argument(std::string("bad factor letter: ") + c);
    };
    if (s == "XX+YX")
        return (Matrix::kron(mats::X(), mats::X()) + Matrix::kron(mats::Y(), mats::X()))
            .scaled(1.0 / std::sqrt(2.0));
    if (s == "XX+XY")
        return (Matrix::kron(mats::X(), mats::X()) + Matrix::kron(mats::X(), mats::Y()))
            .scaled(1.0 / std::sqrt(2.0));
    if (s.size() == 1) return one(s[0]);
    if (s.size() == 2) return Matrix::kron(one(s[0]), one(s[1]));
    throw std::invalid_argument("unknown observable spelling: " + s);
}

const std::vector<std::string>& all_spellings() {
    static const std::vector<std::string> v = {"I",  "X",  "Y",  "Z",  "II",    "XX",   "ZZ",
                                               "XZ", "ZX", "XI", "ZI", "IX",    "IZ",   "YY",
                                               "XY", "YX", "ZY", "YZ", "XX+YX", "XX+XY"};
    return v;
}

}  // namespace

bool is_observable_spelling(const std::string& spelling) {
    const auto& v = all_spellings();
    return std::find(v.begin(), v.end(), spelling) != v.end();
}

Observable named_observable(const std::string& spelling) {
    if (!is_observable_spelling(spelling))
        throw std::invalid_argument("unknown observable spelling: " + spelling);
    return spectral_decompose(matrix_for_spelling(spelling), spelling);
}

const Observable* ObservableSet::find(const std::string& spelling) const {
    for (const auto& o : members)
        if (o.name == spelling) return &o;
    return nullptr;
}

ObservableSet named_set(char model) {
    static const std::map<char, std::vector<std::string>> table = {
        {'A', {"XX", "ZZ", "XZ", "ZX", "XI", "ZI", "XX+YX", "XX+XY"}},
        // Model B admits any one-qubit observables; this is the
        // representative table used for listing purposes.
        {'B', {"X", "Y", "Z"}},
        {'C', {"X", "Z"}},
        {'D', {"XX", "ZZ", "XZ", "ZX", "XI", "ZI", "IX", "IZ", "XX+XY", "XX+YX"}},
        {'E', {"XX", "ZZ", "XZ", "ZX", "XI", "ZI", "IX", "IZ", "XX+XY", "XX+YX"}},
        {'F', {"XX", "ZZ", "XZ", "ZX", "XI", "ZI", "IX", "IZ", "XX+XY"}},
        {'G', {"XX", "ZZ", "XZ", "ZX", "XI", "ZI", "IX", "IZ", "XX+XY"}},
    };
    auto it = table.find(model);
    if (it == table.end())
        throw std::invalid_argument(std::string("unknown observable set: O_") + model);
    ObservableSet set;
    set.name = std::string("O_") + model;
    for (const auto& s : it->second) set.members.push_back(named_observable(s));
    return set;
}

std::vector<std::string> validate(const Observable& obs) {
    std::vector<std::string> out;
    if (obs.branches.empty()) {
        out.push_back("observable has no branches");
        return out;
    }
    const int dim = obs.branches[0].projector.dim;
    for (std::size_t i = 0; i < obs.branches.size(); i++) {
        const Matrix& p = obs.branches[i].projector;
        if (p.dim != dim) {
            out.push_back("branch " + std::to_string(i) + ": projector dimension mismatch");
            continue;
        }
        if (!p.is_hermitian(kProjectorTolerance))
            out.push_back("branch " + std::to_string(i) + ": projector not hermitian");
        if (!(p * p).approx_equal(p, kProjectorTolerance))
            out.push_back("branch " + std::to_string(i) + ": non-idempotent projector");
        for (std::size_t j = i + 1; j < obs.branches.size(); j++) {
            if (obs.branches[j].projector.dim != dim) continue;
            Matrix prod = p * obs.branches[j].projector;
            if (prod.max_abs_diff(Matrix(dim)) > kProjectorTolerance)
                out.push_back("branches " + std::to_string(i) + "," + std::to_string(j) +
                              ": projectors not orthogonal");
        }
    }
    Matrix sum(dim);
    for (const auto& b : obs.branches) {
        if (b.projector.dim == dim) sum = sum + b.projector;
    }
    if (!sum.is_identity(kProjectorTolerance))
        out.push_back("incomplete: projectors do not sum to the identity");
    for (std::size_t i = 1; i < obs.branches.size(); i++)
        if (obs.branches[i - 1].eigenvalue > obs.branches[i].eigenvalue)
            out.push_back("branches not sorted by eigenvalue");
    return out;
}

}  // namespace mqtm
