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

#include <compare>
#include <cstdint>
#include <string>

namespace mqtm {

/// Address of one quantum cell: tape number plus signed position on that tape.
struct CellId {
    int tape = 0;
    std::int64_t index = 0;

    auto operator<=>(const CellId&) const = default;

    std::string str() const { return "t" + std::to_string(tape) + ":" + std::to_string(index); }
};

}  // namespace mqtm
