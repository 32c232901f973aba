/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The risnoma Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "risnoma/ppo/autodiff.hpp"

namespace risnoma::ppo {

inline constexpr std::uint32_t kCheckpointMagic = 0x4b434e52;  // "RNCK"
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Layout: magic, version, array count, then per array rows, cols and the
/// column-major doubles. Integers are little-endian u32/u64.
void save_checkpoint(const std::string& path, const std::vector<const Parameter*>& params);

/// Throws std::runtime_error on a bad header or any shape mismatch; the
/// parameters are left untouched in that case.
void load_checkpoint(const std::string& path, const std::vector<Parameter*>& params);

}  // namespace risnoma::ppo
