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

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mqtm {

using cplx = std::complex<double>;

/// Dense square complex matrix, row-major. Dimensions are powers of two
/// (1, 2 or 4 in practice: one- and two-qubit operators).
struct Matrix {
    int dim = 0;
    std::vector<cplx> a;

    Matrix() = default;
    explicit Matrix(int d) : dim(d), a(static_cast<size_t>(d) * d, cplx(0, 0)) {}

    static Matrix identity(int d) {
        Matrix m(d);
        for (int i = 0; i < d; i++) m.at(i, i) = 1.0;
        return m;
    }

    cplx& at(int r, int c) { return a[static_cast<size_t>(r) * dim + c]; }
    const cplx& at(int r, int c) const { return a[static_cast<size_t>(r) * dim + c]; }

    int num_qubits() const {
        int k = 0;
        while ((1 << k) < dim) k++;
        if ((1 << k) != dim) throw std::invalid_argument("matrix dimension is not a power of two");
        return k;
    }

    Matrix operator*(const Matrix& o) const {
        if (dim != o.dim) throw std::invalid_argument("matrix product: dimension mismatch");
        Matrix r(dim);
        for (int i = 0; i < dim; i++)
            for (int k = 0; k < dim; k++) {
                cplx v = at(i, k);
                if (v == cplx(0, 0)) continue;
                for (int j = 0; j < dim; j++) r.at(i, j) += v * o.at(k, j);
            }
        return r;
    }
    Matrix operator+(const Matrix& o) const {
        if (dim != o.dim) throw std::invalid_argument("matrix sum: dimension mismatch");
        Matrix r = *this;
        for (size_t i = 0; i < a.size(); i++) r.a[i] += o.a[i];
        return r;
    }
    Matrix operator-(const Matrix& o) const {
        if (dim != o.dim) throw std::invalid_argument("matrix difference: dimension mismatch");
        Matrix r = *this;
        for (size_t i = 0; i < a.size(); i++) r.a[i] -= o.a[i];
        return r;
    }
    Matrix scaled(cplx s) const {
        Matrix r = *this;
        for (auto& v : r.a) v *= s;
        return r;
    }
    Matrix adjoint() const {
        Matrix r(dim);
        for (int i = 0; i < dim; i++)
            for (int j = 0; j < dim; j++) r.at(i, j) = std::conj(at(j, i));
        return r;
    }

    cplx trace() const {
        cplx t = 0;
        for (int i = 0; i < dim; i++) t += at(i, i);
        return t;
    }

    double max_abs_diff(const Matrix& o) const {
        if (dim != o.dim) return 1e300;
        double m = 0;
        for (size_t i = 0; i < a.size(); i++) m = std::max(m, std::abs(a[i] - o.a[i]));
        return m;
    }
    bool approx_equal(const Matrix& o, double tol) const { return max_abs_diff(o) <= tol; }
    bool is_hermitian(double tol) const { return approx_equal(adjoint(), tol); }
    bool is_identity(double tol) const { return approx_equal(identity(dim), tol); }

    static Matrix kron(const Matrix& x, const Matrix& y) {
        Matrix r(x.dim * y.dim);
        for (int i = 0; i < x.dim; i++)
            for (int j = 0; j < x.dim; j++)
                for (int k = 0; k < y.dim; k++)
                    for (int l = 0; l < y.dim; l++)
                        r.at(i * y.dim + k, j * y.dim + l) = x.at(i, j) * y.at(k, l);
        return r;
    }
};

namespace mats {

inline Matrix I() { return Matrix::identity(2); }
inline Matrix X() {
    Matrix m(2);
    m.at(0, 1) = 1;
    m.at(1, 0) = 1;
    return m;
}
inline Matrix Y() {
    Matrix m(2);
    m.at(0, 1) = cplx(0, -1);
    m.at(1, 0) = cplx(0, 1);
    return m;
}
inline Matrix Z() {
    Matrix m(2);
    m.at(0, 0) = 1;
    m.at(1, 1) = -1;
    return m;
}
inline Matrix H() {
    const double s = 1.0 / std::sqrt(2.0);
    Matrix m(2);
    m.at(0, 0) = s;
    m.at(0, 1) = s;
    m.at(1, 0) = s;
    m.at(1, 1) = -s;
    return m;
}
// Control on the first tensor factor.
inline Matrix CNot() {
    Matrix m = Matrix::identity(4);
    m.at(2, 2) = 0;
    m.at(3, 3) = 0;
    m.at(2, 3) = 1;
    m.at(3, 2) = 1;
    return m;
}

}  // namespace mats

/// 64-bit splittable PRNG (splitmix64). Deterministic across platforms;
/// split() forks an independent stream.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    SplitMix64 split() { return SplitMix64(next() ^ 0xA3EC647659359ACDULL); }
};

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    SplitMix64 r(a ^ (b * 0xFF51AFD7ED558CCDULL + 0x2545F4914F6CDD1DULL));
    return r.next();
}

}  // namespace mqtm
