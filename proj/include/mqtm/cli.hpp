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

#include <iosfwd>
#include <string>
#include <vector>

#include "mqtm/machine.hpp"

namespace mqtm::cli {

/// Parses a run input: a basis string over {0,1}, or per-qubit amplitude
/// expressions like `0.6|0>+0.8|1>; 1|0>` with complex literals `re[+im i]`.
/// Normalizes (with a warning to `warnings` when the norm is off by more
/// than 1e-6) and returns the amplitude vector.
std::vector<cplx> parse_input_spec(const std::string& spec, std::string* warnings);

/// Entry point used by the `mqtm` binary. Exit codes: 0 success/halted,
/// 2 fuel exhausted (run), 1 error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mqtm::cli
