// SPDX-License-Identifier: Apache-2.0
//
// ce3d: channel estimation laboratory for correlated MIMO-OFDM links
// Copyright (C) 2026 The ce3d authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <iosfwd>

namespace ce3d {

/// Entry point of the `ce3d` tool. Returns the process exit code: 0 on success,
/// 1 for usage or configuration errors, 2 when an estimator row failed.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ce3d
