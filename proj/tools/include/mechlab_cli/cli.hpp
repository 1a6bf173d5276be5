// Copyright 2026 The mechlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MECHLAB_CLI_CLI_HPP_
#define MECHLAB_CLI_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mechlab/mechanism.hpp"
#include "mechlab/scenario.hpp"

namespace mechlab::cli {

enum class Format { kJson, kCsv, kBoth };

struct CommandSpec {
  std::string verb;  // validate | construct | verify | probe | score | compare | export
  std::string scenario;
  std::string out = ".";
  Format format = Format::kJson;
  std::uint64_t seed = 0;
  std::vector<std::string> overrides;  // "section.key=value"
  std::optional<Instrument> instrument;
  unsigned threads = 1;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

// Executes one command.  Diagnostics go to err as a single line.
int run(const CommandSpec& command, std::ostream& err);

// Parses argv with the flag set of the mechlab executable and runs it.
// MECHLAB_THREADS sets the thread count for the pairwise IC scan.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Builds the mechanism described by the scenario's [mechanism] section.
Mechanism build_mechanism(const Scenario& scenario);

std::string sha256_hex(std::string_view bytes);

// Shortest round-trip decimal, independent of the locale.
std::string format_double(double v);

}  // namespace mechlab::cli

#endif  // MECHLAB_CLI_CLI_HPP_
