// Copyright 2026 The PEFA Authors
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

#include <cstddef>
#include <string_view>

// Thin logging facade. Verbosity comes from the PEFA_LOG environment variable
// (trace, debug, info, warn, error, off; default warn). Warnings are counted
// so callers and tests can assert that an operation ran cleanly.
namespace pefa::log {

void debug(std::string_view message);
void info(std::string_view message);
void warn(std::string_view message);
void error(std::string_view message);

/// Number of warnings emitted by this process so far.
std::size_t warning_count();

/// Re-reads PEFA_LOG. Called implicitly on first use.
void configure_from_env();

}  // namespace pefa::log
