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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "mechlab/error.hpp"
#include "mechlab_cli/cli.hpp"
#include "output.hpp"

namespace mechlab::cli {
namespace {

using detail::Json;
using detail::Report;

using Handler = Report (*)(const Scenario&, const CommandSpec&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"validate", detail::cmd_validate}, {"construct", detail::cmd_construct},
      {"verify", detail::cmd_verify},     {"probe", detail::cmd_probe},
      {"score", detail::cmd_score},       {"compare", detail::cmd_compare},
      {"export", detail::cmd_export},
  };
  return table;
}

unsigned threads_from_env() {
  const char* v = std::getenv("MECHLAB_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const unsigned long n = std::strtoul(v, &end, 10);
  return (*end == '\0' && n > 0 && n <= 256) ? static_cast<unsigned>(n) : 1;
}

}  // namespace

int run(const CommandSpec& cmd, std::ostream& err) {
  const auto it = handlers().find(cmd.verb);
  if (it == handlers().end()) {
    err << "mechlab: unknown verb '" << cmd.verb << "'\n";
    return kExitUsage;
  }
  std::string text;
  {
    std::ifstream f(cmd.scenario, std::ios::binary);
    if (!f) {
      err << "mechlab: cannot read scenario " << cmd.scenario << "\n";
      return kExitUsage;
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  std::string hashed = text;
  for (const auto& o : cmd.overrides) hashed += "\n--set " + o;

  try {
    const Scenario sc = parse_scenario(text, cmd.overrides);
    Report report = it->second(sc, cmd);

    Json doc{{"schema", 1},
             {"tool", "mechlab"},
             {"tool_version", MECHLAB_VERSION},
             {"verb", cmd.verb},
             {"scenario_hash", sha256_hex(hashed)},
             {"overrides", cmd.overrides},
             {"seed", cmd.seed}};
    for (auto& [k, v] : report.body.items()) doc[k] = v;
    if (!doc.contains("pass")) doc["pass"] = report.pass;

    const std::filesystem::path out(cmd.out);
    std::filesystem::create_directories(out);
    if (cmd.format != Format::kCsv) {
      detail::write_atomic(out / (cmd.verb + ".json"), doc.dump(2) + "\n");
    }
    if (cmd.format != Format::kJson) {
      for (const auto& [name, body] : report.csv) detail::write_atomic(out / name, body);
    }
    return report.pass ? kExitOk : kExitCheckFailed;
  } catch (const Error& e) {
    err << "mechlab: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "mechlab: " << e.what() << "\n";
  }
  return kExitUsage;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equitable screening mechanisms: construct, verify, probe, score."};
  app.name("mechlab");
  CommandSpec cmd;
  std::string format = "json";
  std::string instrument;
  std::vector<std::string> verbs;
  for (const auto& [name, h] : handlers()) verbs.push_back(name);

  app.add_option("verb", cmd.verb, "validate | construct | verify | probe | score | compare | export")
      ->required()
      ->check(CLI::IsMember(verbs));
  app.add_option("--scenario", cmd.scenario, "scenario file")->required();
  app.add_option("--out", cmd.out, "output directory")->capture_default_str();
  app.add_option("--format", format, "json | csv | both")
      ->check(CLI::IsMember({"json", "csv", "both"}))
      ->capture_default_str();
  app.add_option("--seed", cmd.seed, "seed for every sampler")->capture_default_str();
  app.add_option("--set", cmd.overrides, "override section.key=value")->allow_extra_args(false);
  app.add_option("--instrument", instrument, "probe instrument: payments | ordeals")
      ->check(CLI::IsMember({"payments", "ordeals"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  cmd.format = format == "csv" ? Format::kCsv : format == "both" ? Format::kBoth : Format::kJson;
  if (!instrument.empty()) {
    cmd.instrument = instrument == "ordeals" ? Instrument::kOrdeals : Instrument::kPayments;
  }
  cmd.threads = threads_from_env();
  return run(cmd, err);
}

}  // namespace mechlab::cli
