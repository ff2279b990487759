// Copyright 2026 The crowdqf Authors
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


#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "crowdqf/errors.hpp"
#include "crowdqf/text.hpp"

namespace crowdqf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitConfig = 3;

/// What a run needs to be repeated: the subcommand, every resolved option
/// (defaults included) and the seed. Written next to the outputs.
struct RunManifest {
  std::string subcommand;
  text::KeyValues options;   // long name -> value, declaration order
  std::vector<std::string> switches;  // flags that were set
  std::uint64_t seed{0};
  std::string version;
};

[[nodiscard]] std::string manifest_to_text(const RunManifest& manifest);
[[nodiscard]] RunManifest parse_manifest(std::istream& in);
[[nodiscard]] RunManifest load_manifest(const std::string& path);

/// Command line (without program name) that repeats the manifest's run.
[[nodiscard]] std::vector<std::string> manifest_arguments(const RunManifest& manifest);

[[nodiscard]] int exit_code(ErrorKind kind) noexcept;

/// `args` excludes the program name. Data goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crowdqf::cli
