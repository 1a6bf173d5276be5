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

#include "output.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "mechlab/error.hpp"
#include "mechlab_cli/cli.hpp"

namespace mechlab::cli {

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xf]);
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

Json type_json(const Type& t) { return Json{{"alpha", t.alpha}, {"beta", t.beta}}; }

Csv::Csv(std::vector<std::string> header) : width_(header.size()) { row(header); }

void Csv::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row(cells);
}

void Csv::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) {
    throw Error(ErrorCode::kInvalidArgument, "csv row width does not match the header");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_.push_back(',');
    text_ += cells[i];
  }
  text_.push_back('\n');
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw Error(ErrorCode::kInvalidArgument, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kInvalidArgument, "cannot rename onto " + path.string());
}

}  // namespace detail
}  // namespace mechlab::cli
