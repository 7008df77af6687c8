/*
 * Copyright 2026 The lowfake Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>

namespace lowfake::cli {

/// Runs one command line. Returns 0 on success, 1 on a runtime failure
/// (diagnostic on `err`) and 2 on a usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Seed used when no --seed is given: LOWFAKE_SEED when set, else 0.
/// Throws ConfigError when the variable is not an unsigned integer.
std::uint64_t default_seed();

/// Parses an unsigned seed; accepts decimal only.
std::optional<std::uint64_t> parse_seed(std::string_view text);

}  // namespace lowfake::cli
