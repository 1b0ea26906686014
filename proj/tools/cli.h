// Copyright 2026 The URNN Authors
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

#ifndef URNN_TOOLS_CLI_H_
#define URNN_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace urnn::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIntegrity = 3;
inline constexpr int kExitNumerical = 4;

// Runs one `urnn` invocation. args excludes the program name.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Lowercase hex SHA-256 of a file's bytes.
std::string Sha256File(const std::string& path);

}  // namespace urnn::cli

#endif  // URNN_TOOLS_CLI_H_
