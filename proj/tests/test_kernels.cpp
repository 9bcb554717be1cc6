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

#include <vector>

#include "doctest.h"
#include "mqtm/kernels.hpp"

using namespace mqtm;

namespace {

std::vector<cplx> random_vector(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<cplx> v(n);
    for (auto& a : v) a = cplx(rng.next_double() - 0.5, rng.next_double() - 0.5);
    return v;
}

Matrix random_matrix(int dim, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Matrix m(dim);
    for (auto& a : m.a) a = cplx(rng.next_double() - 0.5, rng.next_double() - 0.5);
    return m;
}

// Reference implementation: explicit sum over the operator's action on the
// target bits, every index visited directly.
std::vector<cplx> apply_naive(const std::vector<cplx>& amps, const Matrix& m,
                              const std::vector<int>& shifts) {
    const int k = m.num_qubits();
    std::vector<cplx> out(amps.size(), cplx(0, 0));
    for (std::size_t idx = 0; idx < amps.size(); idx++) {
        int row = 0;
        for (int j = 0; j < k; j++) row = (row << 1) | static_cast<int>((idx >> shifts[j]) & 1);
        std::size_t base = idx;
        for (int j = 0; j < k; j++) base &= ~(std::size_t{1} << shifts[j]);
        for (int col = 0; col < (1 << k); col++) {
            std::size_t src = base;
            for (int j = 0; j < k; j++)
                if ((col >> (k - 1 - j)) & 1) src |= std::size_t{1} << shifts[j];
            out[idx] += m.at(row, col) * amps[src];
        }
    }
    return out;
}

}  // namespace

TEST_CASE("apply_matrix agrees with the naive reference on random operators") {
    for (int n : {2, 3, 5}) {
        for (std::uint64_t seed = 0; seed < 8; seed++) {
            auto amps = random_vector(std::size_t{1} << n, seed * 11 + 1);
            SplitMix64 pick(seed * 13 + 3);
            int k = 1 + static_cast<int>(pick.next() % 2);
            std::vector<int> shifts;
            while (static_cast<int>(shifts.size()) < k) {
                int s = static_cast<int>(pick.next() % n);
                bool dup = false;
                for (int t : shifts) dup |= t == s;
                if (!dup) shifts.push_back(s);
            }
            Matrix m = random_matrix(1 << k, seed * 17 + 5);

            auto expected = apply_naive(amps, m, shifts);
            auto got = amps;
            kernels::apply_matrix(got, m, shifts, kernels::Exec::serial);
            for (std::size_t i = 0; i < expected.size(); i++)
                CHECK(std::abs(expected[i] - got[i]) < 1e-12);
        }
    }
}

TEST_CASE("parallel kernels match the serial reference bit for bit") {
    const std::size_t saved = kernels::parallel_threshold();
    kernels::parallel_threshold() = 1 << 8;  // force real thread fan-out
    const int n = 15;
    auto amps = random_vector(std::size_t{1} << n, 99);
    Matrix m1 = random_matrix(2, 7);
    Matrix m2 = random_matrix(4, 8);

    auto serial = amps;
    kernels::apply_matrix(serial, m1, {3}, kernels::Exec::serial);
    kernels::apply_matrix(serial, m2, {0, 7}, kernels::Exec::serial);
    auto parallel = amps;
    kernels::apply_matrix(parallel, m1, {3}, kernels::Exec::parallel);
    kernels::apply_matrix(parallel, m2, {0, 7}, kernels::Exec::parallel);
    CHECK(serial == parallel);

    CHECK(kernels::norm_squared(serial, kernels::Exec::serial) ==
          doctest::Approx(kernels::norm_squared(serial, kernels::Exec::parallel)).epsilon(1e-13));

    auto sa = amps, pa = amps;
    kernels::scale(sa, 0.25, kernels::Exec::serial);
    kernels::scale(pa, 0.25, kernels::Exec::parallel);
    CHECK(sa == pa);
    CHECK(kernels::truncate_below(sa, 1e-3, kernels::Exec::serial) ==
          kernels::truncate_below(pa, 1e-3, kernels::Exec::parallel));
    CHECK(sa == pa);
    kernels::parallel_threshold() = saved;
}

TEST_CASE("permute_gather relocates qubits") {
    const std::size_t saved = kernels::parallel_threshold();
    kernels::parallel_threshold() = 1 << 8;
    // Swap the two qubits of |01>: amplitude index 0b01 -> 0b10.
    std::vector<cplx> src = {0, 1, 0, 0};
    std::vector<cplx> dst;
    kernels::permute_gather(src, dst, {1, 0}, kernels::Exec::serial);
    CHECK(dst[2] == cplx(1, 0));

    auto big = random_vector(std::size_t{1} << 15, 4);
    std::vector<int> perm = {5, 3, 11, 0, 7, 1, 14, 2, 9, 4, 8, 6, 13, 10, 12};
    std::vector<cplx> a, b;
    kernels::permute_gather(big, a, perm, kernels::Exec::serial);
    kernels::permute_gather(big, b, perm, kernels::Exec::parallel);
    CHECK(a == b);
    kernels::parallel_threshold() = saved;
}

TEST_CASE("kernel argument validation") {
    std::vector<cplx> amps(4, cplx(0.5, 0));
    CHECK_THROWS(kernels::apply_matrix(amps, Matrix::identity(2), {0, 1}, kernels::Exec::serial));
    Matrix m(3);
    CHECK_THROWS(kernels::apply_matrix(amps, m, {0}, kernels::Exec::serial));
}
