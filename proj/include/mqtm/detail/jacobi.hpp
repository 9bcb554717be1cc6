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
#include <vector>

#include "mqtm/linalg.hpp"

namespace mqtm::detail {

struct EigenSystem {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column j is the eigenvector of values[j]
};

/// Cyclic Jacobi for hermitian matrices. Small dimensions only (the
/// registers here cap at a few hundred); plenty accurate for rank counting
/// and as a cross-check oracle for closed-form decompositions.
inline EigenSystem jacobi_hermitian(Matrix m, int sweeps = 64, double tol = 1e-13) {
    const int n = m.dim;
    Matrix v = Matrix::identity(n);

    for (int sweep = 0; sweep < sweeps; sweep++) {
        double off = 0;
        for (int p = 0; p < n; p++)
            for (int q = p + 1; q < n; q++) off += std::norm(m.at(p, q));
        if (off < tol * tol) break;

        for (int p = 0; p < n; p++) {
            for (int q = p + 1; q < n; q++) {
                cplx apq = m.at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                double app = m.at(p, p).real();
                double aqq = m.at(q, q).real();
                // Unitary 2x2 rotation [ [c, -conj(s)], [s, c] ] zeroing (p,q).
                double theta = 0.5 * std::atan2(2.0 * std::abs(apq), aqq - app);
                cplx phase = apq / std::abs(apq);
                double c = std::cos(theta);
                cplx s = std::sin(theta) * phase;

                for (int i = 0; i < n; i++) {
                    cplx mip = m.at(i, p), miq = m.at(i, q);
                    m.at(i, p) = c * mip - std::conj(s) * miq;
                    m.at(i, q) = s * mip + c * miq;
                }
                for (int i = 0; i < n; i++) {
                    cplx mpi = m.at(p, i), mqi = m.at(q, i);
                    m.at(p, i) = c * mpi - s * mqi;
                    m.at(q, i) = std::conj(s) * mpi + c * mqi;
                }
                for (int i = 0; i < n; i++) {
                    cplx vip = v.at(i, p), viq = v.at(i, q);
                    v.at(i, p) = c * vip - std::conj(s) * viq;
                    v.at(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<int> order(n);
    for (int i = 0; i < n; i++) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return m.at(a, a).real() < m.at(b, b).real(); });

    EigenSystem out;
    out.vectors = Matrix(n);
    for (int j = 0; j < n; j++) {
        out.values.push_back(m.at(order[j], order[j]).real());
        for (int i = 0; i < n; i++) out.vectors.at(i, j) = v.at(i, order[j]);
    }
    return out;
}

}  // namespace mqtm::detail
