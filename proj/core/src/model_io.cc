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

#include "urnn/model_io.h"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "urnn/config.h"

namespace urnn {
namespace {

static_assert(std::endian::native == std::endian::little, "little-endian host required");

constexpr char kMagic[4] = {'U', 'R', 'N', 'N'};

class Writer {
 public:
  template <typename T>
  void Put(T v) {
    const auto* p = reinterpret_cast<const uint8_t*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void PutBytes(const void* data, size_t n) {
    const auto* p = static_cast<const uint8_t*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  std::vector<uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<uint8_t> bytes_;
};

class Reader {
 public:
  Reader(const std::vector<uint8_t>& bytes, size_t end) : bytes_(bytes), end_(end) {}
  template <typename T>
  T Get() {
    T v;
    std::memcpy(&v, Take(sizeof(T)), sizeof(T));
    return v;
  }
  std::string GetString(size_t n) {
    const uint8_t* p = Take(n);
    return std::string(reinterpret_cast<const char*>(p), n);
  }
  bool done() const { return pos_ == end_; }

 private:
  const uint8_t* Take(size_t n) {
    if (n > end_ - pos_) throw IntegrityError("model file: record runs past the end");
    const uint8_t* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  const std::vector<uint8_t>& bytes_;
  size_t end_;
  size_t pos_ = 0;
};

uint32_t Crc32(const uint8_t* data, size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  return static_cast<uint32_t>(crc32(crc, data, static_cast<uInt>(n)));
}

}  // namespace

std::vector<uint8_t> SerializeModel(const ForecastModel& model) {
  Writer w;
  w.PutBytes(kMagic, 4);
  w.Put<uint16_t>(kModelFormatVersion);
  const std::string config = ToJson(model.config()).dump();
  w.Put<uint32_t>(static_cast<uint32_t>(config.size()));
  w.PutBytes(config.data(), config.size());
  const auto params = model.Parameters();
  w.Put<uint32_t>(static_cast<uint32_t>(params.size()));
  for (const Parameter* p : params) {
    w.Put<uint32_t>(static_cast<uint32_t>(p->name.size()));
    w.PutBytes(p->name.data(), p->name.size());
    w.Put<uint32_t>(static_cast<uint32_t>(p->value.rank()));
    for (size_t extent : p->value.shape()) w.Put<uint64_t>(extent);
    for (Scalar v : p->value.data()) w.Put<double>(static_cast<double>(v));
  }
  w.Put<uint32_t>(Crc32(w.bytes().data(), w.bytes().size()));
  return std::move(w.bytes());
}

ForecastModel DeserializeModel(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw IntegrityError("model file: bad magic (not a URNN model)");
  }
  if (bytes.size() < 6) throw IntegrityError("model file: truncated header, checksum missing");
  uint16_t version;
  std::memcpy(&version, bytes.data() + 4, 2);
  if (version != kModelFormatVersion) {
    throw VersionError("model file: format version " + std::to_string(version) +
                       " is not supported (expected " + std::to_string(kModelFormatVersion) +
                       ")");
  }
  if (bytes.size() < 10) throw IntegrityError("model file: truncated, checksum missing");
  const size_t body = bytes.size() - 4;
  uint32_t stored;
  std::memcpy(&stored, bytes.data() + body, 4);
  if (Crc32(bytes.data(), body) != stored) {
    throw IntegrityError("model file: checksum mismatch (corrupt or truncated file)");
  }

  Reader r(bytes, body);
  r.GetString(6);
  const std::string config_text = r.GetString(r.Get<uint32_t>());
  ModelConfig config;
  try {
    config = ModelConfigFromJson(nlohmann::json::parse(config_text));
  } catch (const std::exception& e) {
    throw IntegrityError(std::string("model file: bad config block: ") + e.what());
  }
  ForecastModel model = ForecastModel::Create(config, 0);
  const size_t count = r.Get<uint32_t>();
  if (count != model.Parameters().size()) {
    throw IntegrityError("model file: parameter count does not match its config");
  }
  for (size_t k = 0; k < count; ++k) {
    const std::string name = r.GetString(r.Get<uint32_t>());
    Parameter& p = model.FindParameter(name);
    const size_t rank = r.Get<uint32_t>();
    Shape shape(rank);
    for (size_t& extent : shape) extent = r.Get<uint64_t>();
    if (shape != p.value.shape()) {
      throw IntegrityError("model file: parameter " + name + " has shape " +
                           ShapeToString(shape) + ", config implies " + p.value.ShapeString());
    }
    for (Scalar& v : p.value.data()) v = static_cast<Scalar>(r.Get<double>());
  }
  if (!r.done()) throw IntegrityError("model file: trailing bytes after parameter records");
  return model;
}

void SaveModel(const ForecastModel& model, const std::string& path) {
  const std::vector<uint8_t> bytes = SerializeModel(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path);
}

ForecastModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return DeserializeModel(bytes);
}

}  // namespace urnn
