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

#ifndef MECHLAB_CLI_OUTPUT_HPP_
#define MECHLAB_CLI_OUTPUT_HPP_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mechlab/model.hpp"

namespace mechlab::cli::detail {

using Json = nlohmann::ordered_json;

// Non-finite values become the strings "inf", "-inf", "nan".
Json number(double v);
Json type_json(const Type& t);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);
  const std::string& str() const { return text_; }

 private:
  std::size_t width_;
  std::string text_;
};

struct Report {
  Json body = Json::object();
  std::vector<std::pair<std::string, std::string>> csv;  // file name, contents
  bool pass = true;
};

// Writes to a sibling temp file then renames over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace mechlab::cli::detail

#endif  // MECHLAB_CLI_OUTPUT_HPP_
