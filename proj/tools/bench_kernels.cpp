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

// Compares the serial reference kernels against the OpenMP path on
// register sizes above the simulator's usual working range.

#include <chrono>
#include <cstdio>
#include <vector>

#include "mqtm/kernels.hpp"
#include "mqtm/observable.hpp"

using namespace mqtm;

namespace {

double seconds_per_op(kernels::Exec exec, int qubits, int reps) {
    std::vector<cplx> amps(std::size_t{1} << qubits, cplx(0, 0));
    amps[0] = 1.0;
    Matrix h = mats::H();
    Matrix xx = (Matrix::kron(mats::X(), mats::X()) + Matrix::kron(mats::X(), mats::Y()))
                    .scaled(1.0 / std::sqrt(2.0));
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; r++) {
        for (int q = 0; q < qubits; q++) kernels::apply_matrix(amps, h, {q}, exec);
        for (int q = 0; q + 1 < qubits; q += 2) kernels::apply_matrix(amps, xx, {q, q + 1}, exec);
        volatile double n = kernels::norm_squared(amps, exec);
        (void)n;
    }
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
    int max_qubits = argc > 1 ? std::atoi(argv[1]) : 20;
    int reps = argc > 2 ? std::atoi(argv[2]) : 5;
    kernels::parallel_threshold() = 1 << 10;  // measure the fan-out itself
    std::printf("%8s %14s %14s %8s\n", "qubits", "serial (s)", "parallel (s)", "speedup");
    for (int q = 10; q <= max_qubits; q += 2) {
        double s = seconds_per_op(kernels::Exec::serial, q, reps);
        double p = seconds_per_op(kernels::Exec::parallel, q, reps);
        std::printf("%8d %14.6f %14.6f %8.2f\n", q, s, p, s / p);
    }
    return 0;
}
