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

#include <cstdint>
#include <vector>

#include "mqtm/linalg.hpp"

namespace mqtm::kernels {

/// Execution backends for the amplitude-vector kernels. `parallel` uses
/// OpenMP when compiled in and falls back to the serial path otherwise.
/// The serial path is the reference implementation; both must agree
/// bit-for-bit on the same input ordering of operations.
enum class Exec { serial, parallel };

Exec& default_exec();

/// Amplitude count at which the parallel path actually fans out to OpenMP
/// threads; below it even Exec::parallel runs the serial loop. Mutable so
/// benchmarks and tests can move it.
std::size_t& parallel_threshold();

/// Applies a k-qubit dense matrix to the amplitude vector. `target_shifts`
/// holds, per operator qubit (most significant factor first), the bit shift
/// of that qubit within an amplitude index. Shifts must be distinct.
void apply_matrix(std::vector<cplx>& amps, const Matrix& m,
                  const std::vector<int>& target_shifts, Exec exec);

double norm_squared(const std::vector<cplx>& amps, Exec exec);

cplx inner_product(const std::vector<cplx>& a, const std::vector<cplx>& b, Exec exec);

void scale(std::vector<cplx>& amps, double factor, Exec exec);

/// Zeroes amplitudes with |amp| below `eps`; returns how many were cleared.
std::size_t truncate_below(std::vector<cplx>& amps, double eps, Exec exec);

/// dst[i] = src[g(i)] where g relocates each qubit: bit taken from
/// src_shift_for_dst_bit[j] of the source index lands at shift j of the
/// destination index.
void permute_gather(const std::vector<cplx>& src, std::vector<cplx>& dst,
                    const std::vector<int>& src_shift_for_dst_bit, Exec exec);

}  // namespace mqtm::kernels
