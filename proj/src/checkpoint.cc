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

#include "dro/checkpoint.h"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>

#include "dro/errors.h"

namespace dro {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

constexpr std::size_t kHeaderSize = sizeof(kCheckpointMagic) + 1;
constexpr std::size_t kCrcSize = 4;

class Writer {
 public:
  template <typename T>
  void Array(std::span<const T> values) {
    static_assert(sizeof(T) == 8);
    Raw(static_cast<std::uint64_t>(values.size()));
    for (const T& v : values) Raw(v);
  }
  void Scalar(std::int64_t v) { Array(std::span<const std::int64_t>(&v, 1)); }

  template <typename T>
  void Raw(const T& v) {
    std::uint8_t buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    bytes.insert(bytes.end(), buf, buf + sizeof(T));
  }

  std::vector<std::uint8_t> bytes;
};

class Reader {
 public:
  Reader(const std::vector<std::uint8_t>& bytes, std::size_t begin, std::size_t end)
      : bytes_(bytes), pos_(begin), end_(end) {}

  template <typename T>
  std::vector<T> Array(const char* field) {
    const auto count = Raw<std::uint64_t>(field);
    if (count > (end_ - pos_) / sizeof(T)) {
      throw CheckpointTruncatedError(std::string("checkpoint truncated in field ") + field);
    }
    std::vector<T> out(count);
    for (auto& v : out) v = Raw<T>(field);
    return out;
  }

  std::int64_t Scalar(const char* field) {
    const auto v = Array<std::int64_t>(field);
    if (v.size() != 1) {
      throw CheckpointFormatError(std::string("field ") + field + " must hold one element");
    }
    return v[0];
  }

  template <typename T>
  T Raw(const char* field) {
    if (end_ - pos_ < sizeof(T)) {
      throw CheckpointTruncatedError(std::string("checkpoint truncated in field ") + field);
    }
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::size_t pos() const { return pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_;
  std::size_t end_;
};

std::uint32_t Crc32(std::span<const std::uint8_t> data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, data.data(), static_cast<uInt>(data.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::vector<std::uint8_t> EncodeCheckpoint(const TrainState& state) {
  Writer w;
  w.bytes.assign(std::begin(kCheckpointMagic), std::end(kCheckpointMagic));
  w.bytes.push_back(kCheckpointVersion);
  std::vector<std::int64_t> dims(state.model.layer_dims.begin(), state.model.layer_dims.end());
  w.Array<std::int64_t>(dims);
  w.Array<double>(state.model.params);
  w.Array<double>(state.store.losses);
  w.Array<std::int64_t>(state.store.last_update);
  w.Scalar(state.store.step);
  w.Array<double>(state.velocity);
  w.Scalar(state.step);
  w.Raw(Crc32(w.bytes));
  return std::move(w.bytes);
}

TrainState DecodeCheckpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < sizeof(kCheckpointMagic)) {
    throw CheckpointTruncatedError("checkpoint shorter than its magic");
  }
  if (std::memcmp(bytes.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0) {
    throw CheckpointFormatError("not a checkpoint: bad magic");
  }
  if (bytes.size() < kHeaderSize + kCrcSize) {
    throw CheckpointTruncatedError("checkpoint shorter than its header");
  }
  const std::uint8_t version = bytes[sizeof(kCheckpointMagic)];
  if (version != kCheckpointVersion) {
    throw CheckpointVersionError("unsupported checkpoint version " + std::to_string(version));
  }

  Reader r(bytes, kHeaderSize, bytes.size() - kCrcSize);
  TrainState s;
  for (std::int64_t d : r.Array<std::int64_t>("layer_dims")) {
    if (d <= 0) throw CheckpointFormatError("non-positive layer dim");
    s.model.layer_dims.push_back(static_cast<std::size_t>(d));
  }
  s.model.params = r.Array<double>("params");
  s.store.losses = r.Array<double>("store.losses");
  s.store.last_update = r.Array<std::int64_t>("store.last_update");
  s.store.step = r.Scalar("store.step");
  s.velocity = r.Array<double>("velocity");
  s.step = r.Scalar("step");
  if (r.pos() != bytes.size() - kCrcSize) {
    throw CheckpointFormatError("trailing bytes after the last field");
  }

  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + r.pos(), kCrcSize);
  if (stored != Crc32(std::span(bytes.data(), r.pos()))) {
    throw CheckpointChecksumError("checkpoint checksum mismatch");
  }

  if (s.model.layer_dims.size() < 2 || s.model.params.size() != ParameterCount(s.model.layer_dims) ||
      s.store.losses.size() != s.store.last_update.size() ||
      s.velocity.size() != s.model.params.size()) {
    throw CheckpointFormatError("checkpoint fields are inconsistent");
  }
  return s;
}

void SaveCheckpoint(const TrainState& state, const std::string& path) {
  const auto bytes = EncodeCheckpoint(state);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path);
}

TrainState LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return DecodeCheckpoint(bytes);
}

}  // namespace dro
