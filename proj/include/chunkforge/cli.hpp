// Copyright 2026 The ChunkForge Authors.
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

#include <ostream>
#include <string>
#include <vector>

namespace chunkforge::cli {

// Runs one subcommand. `args` excludes the program name. Machine-readable
// JSON goes to `out`; diagnostics and help go to `err`. Returns the process
// exit status: 0 success, 1 metric/key errors, 2 I/O, parse or usage errors.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace chunkforge::cli
