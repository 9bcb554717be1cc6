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

#include "mqtm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mqtm::kernels {

namespace {

bool use_parallel(Exec exec, std::size_t n) {
#ifdef _OPENMP
    return exec == Exec::parallel && n >= parallel_threshold();
#else
    (void)exec;
    (void)n;
    return false;
#endif
}

template <int K>
void apply_matrix_block(std::vector<cplx>& amps, const Matrix& m,
                        const std::vector<int>& target_shifts, bool parallel) {
    constexpr int block = 1 << K;
    const std::int64_t groups = static_cast<std::int64_t>(amps.size()) >> K;

    int sorted_shifts[K];
    for (int j = 0; j < K; j++) sorted_shifts[j] = target_shifts[j];
    std::sort(sorted_shifts, sorted_shifts + K);

    // Offset of each block element: bit j of the block index corresponds to
    // operator qubit j counted from the least significant factor.
    std::uint64_t offsets[block];
    for (int b = 0; b < block; b++) {
        std::uint64_t off = 0;
        for (int j = 0; j < K; j++)
            if ((b >> j) & 1) off |= std::uint64_t{1} << target_shifts[K - 1 - j];
        offsets[b] = off;
    }

    auto body = [&](std::int64_t g) {
        std::uint64_t base = static_cast<std::uint64_t>(g);
        for (int j = 0; j < K; j++) {
            std::uint64_t low = base & ((std::uint64_t{1} << sorted_shifts[j]) - 1);
            base = ((base >> sorted_shifts[j]) << (sorted_shifts[j] + 1)) | low;
        }
        cplx in[block];
        for (int b = 0; b < block; b++) in[b] = amps[base + offsets[b]];
        for (int r = 0; r < block; r++) {
            cplx acc(0, 0);
            for (int c = 0; c < block; c++) acc += m.at(r, c) * in[c];
            amps[base + offsets[r]] = acc;
        }
    };

    // Small registers never touch the OpenMP runtime.
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (std::int64_t g = 0; g < groups; g++) body(g);
#endif
    } else {
        for (std::int64_t g = 0; g < groups; g++) body(g);
    }
}

}  // namespace

Exec& default_exec() {
#ifdef _OPENMP
    static Exec e = Exec::parallel;
#else
    static Exec e = Exec::serial;
#endif
    return e;
}

// Registers stay small (14 qubits by default), so threads only pay off on
// the larger benchmark sizes.
std::size_t& parallel_threshold() {
    static std::size_t n = std::size_t{1} << 17;
    return n;
}

void apply_matrix(std::vector<cplx>& amps, const Matrix& m,
                  const std::vector<int>& target_shifts, Exec exec) {
    const int k = m.num_qubits();
    if (static_cast<int>(target_shifts.size()) != k)
        throw std::invalid_argument("apply_matrix: operator arity does not match target count");
    if (amps.size() < (std::size_t{1} << k))
        throw std::invalid_argument("apply_matrix: register smaller than operator");
    const bool par = use_parallel(exec, amps.size());
    switch (k) {
        case 0: {
            for (auto& v : amps) v *= m.at(0, 0);
            return;
        }
        case 1: apply_matrix_block<1>(amps, m, target_shifts, par); return;
        case 2: apply_matrix_block<2>(amps, m, target_shifts, par); return;
        case 3: apply_matrix_block<3>(amps, m, target_shifts, par); return;
        default: throw std::invalid_argument("apply_matrix: operators above 3 qubits unsupported");
    }
}

double norm_squared(const std::vector<cplx>& amps, Exec exec) {
    const std::int64_t n = static_cast<std::int64_t>(amps.size());
    double total = 0;
    if (use_parallel(exec, amps.size())) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : total)
        for (std::int64_t i = 0; i < n; i++) total += std::norm(amps[i]);
#endif
    } else {
        for (std::int64_t i = 0; i < n; i++) total += std::norm(amps[i]);
    }
    return total;
}

cplx inner_product(const std::vector<cplx>& a, const std::vector<cplx>& b, Exec exec) {
    if (a.size() != b.size()) throw std::invalid_argument("inner_product: size mismatch");
    const std::int64_t n = static_cast<std::int64_t>(a.size());
    double re = 0, im = 0;
    if (use_parallel(exec, a.size())) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : re, im)
        for (std::int64_t i = 0; i < n; i++) {
            cplx t = std::conj(a[i]) * b[i];
            re += t.real();
            im += t.imag();
        }
#endif
    } else {
        for (std::int64_t i = 0; i < n; i++) {
            cplx t = std::conj(a[i]) * b[i];
            re += t.real();
            im += t.imag();
        }
    }
    return {re, im};
}

void scale(std::vector<cplx>& amps, double factor, Exec exec) {
    const std::int64_t n = static_cast<std::int64_t>(amps.size());
    if (use_parallel(exec, amps.size())) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; i++) amps[i] *= factor;
#endif
    } else {
        for (std::int64_t i = 0; i < n; i++) amps[i] *= factor;
    }
}

std::size_t truncate_below(std::vector<cplx>& amps, double eps, Exec exec) {
    const std::int64_t n = static_cast<std::int64_t>(amps.size());
    std::int64_t cleared = 0;
    if (use_parallel(exec, amps.size())) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : cleared)
        for (std::int64_t i = 0; i < n; i++) {
            if (amps[i] != cplx(0, 0) && std::abs(amps[i]) < eps) {
                amps[i] = cplx(0, 0);
                cleared++;
            }
        }
#endif
    } else {
        for (std::int64_t i = 0; i < n; i++) {
            if (amps[i] != cplx(0, 0) && std::abs(amps[i]) < eps) {
                amps[i] = cplx(0, 0);
                cleared++;
            }
        }
    }
    return static_cast<std::size_t>(cleared);
}

void permute_gather(const std::vector<cplx>& src, std::vector<cplx>& dst,
                    const std::vector<int>& src_shift_for_dst_bit, Exec exec) {
    const std::int64_t n = static_cast<std::int64_t>(src.size());
    dst.resize(src.size());
    const int bits = static_cast<int>(src_shift_for_dst_bit.size());
    if ((std::int64_t{1} << bits) != n)
        throw std::invalid_argument("permute_gather: bit count does not match size");

    auto gather_index = [&](std::int64_t i) {
        std::uint64_t s = 0;
        for (int j = 0; j < bits; j++)
            if ((i >> j) & 1) s |= std::uint64_t{1} << src_shift_for_dst_bit[j];
        return s;
    };

    if (use_parallel(exec, src.size())) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; i++) dst[i] = src[gather_index(i)];
#endif
    } else {
        for (std::int64_t i = 0; i < n; i++) dst[i] = src[gather_index(i)];
    }
}

}  // namespace mqtm::kernels
