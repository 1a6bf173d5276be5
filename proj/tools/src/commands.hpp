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

#ifndef MECHLAB_CLI_COMMANDS_HPP_
#define MECHLAB_CLI_COMMANDS_HPP_

#include "mechlab/scenario.hpp"
#include "mechlab_cli/cli.hpp"
#include "output.hpp"

namespace mechlab::cli::detail {

Report cmd_validate(const Scenario& sc, const CommandSpec& cmd);
Report cmd_construct(const Scenario& sc, const CommandSpec& cmd);
Report cmd_verify(const Scenario& sc, const CommandSpec& cmd);
Report cmd_probe(const Scenario& sc, const CommandSpec& cmd);
Report cmd_score(const Scenario& sc, const CommandSpec& cmd);
Report cmd_compare(const Scenario& sc, const CommandSpec& cmd);
Report cmd_export(const Scenario& sc, const CommandSpec& cmd);

}  // namespace mechlab::cli::detail

#endif  // MECHLAB_CLI_COMMANDS_HPP_
