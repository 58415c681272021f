/*
 * Copyright 2026 The hwsdro Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Binary checkpoint of a TrainState.
//
//   "DROCK" | version:u8 | 7 arrays | crc32:u32le
//
// Each array is a u64le element count followed by little-endian float64 or
// int64 elements, in this order: layer_dims (i64), params (f64), stale
// losses (f64), last_update (i64), store step (i64, one element), velocity
// (f64), train step (i64, one element). The CRC32 covers every byte before
// it, magic included.

#ifndef DRO_CHECKPOINT_H_
#define DRO_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dro/trainer.h"

namespace dro {

inline constexpr char kCheckpointMagic[5] = {'D', 'R', 'O', 'C', 'K'};
inline constexpr std::uint8_t kCheckpointVersion = 1;

std::vector<std::uint8_t> EncodeCheckpoint(const TrainState& state);

// Throws CheckpointFormatError (bad magic, inconsistent payload, trailing
// bytes), CheckpointVersionError, CheckpointTruncatedError or
// CheckpointChecksumError.
TrainState DecodeCheckpoint(const std::vector<std::uint8_t>& bytes);

// IoError when the file cannot be written or read.
void SaveCheckpoint(const TrainState& state, const std::string& path);
TrainState LoadCheckpoint(const std::string& path);

}  // namespace dro

#endif  // DRO_CHECKPOINT_H_
