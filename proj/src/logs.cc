// Copyright 2026 The rlcfr Authors.
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

#include "rlcfr/logs.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "rlcfr/error.h"

namespace rlcfr {

namespace {

template <typename T>
void put(std::string& buf, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  buf.append(bytes, sizeof(T));
}

struct Cursor {
  const std::string& buf;
  size_t pos;
  size_t end;

  template <typename T>
  T get() {
    if (pos + sizeof(T) > end) throw Error(ErrorCode::kIo, "truncated log record");
    T value;
    std::memcpy(&value, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return value;
  }
  std::string bytes(size_t n) {
    if (pos + n > end) throw Error(ErrorCode::kIo, "truncated log record");
    std::string out = buf.substr(pos, n);
    pos += n;
    return out;
  }
};

std::string header(const char* magic) {
  std::string h(1, static_cast<char>(kLogVersion));
  h.append(magic, 7);
  return h;
}

void append_records(const std::string& path, const char* magic, const std::vector<std::string>& records) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::kIo, "cannot append to " + path);
  if (fresh) {
    const auto h = header(magic);
    out.write(h.data(), h.size());
  }
  for (const auto& r : records) {
    std::string framed;
    put<uint32_t>(framed, r.size());
    framed += r;
    out.write(framed.data(), framed.size());
  }
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path);
}

// Record bodies in file order.
std::vector<std::string> read_records(const std::string& path, const char* magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto h = header(magic);
  if (buf.compare(0, h.size(), h) != 0) throw Error(ErrorCode::kIo, "bad log header in " + path);
  std::vector<std::string> out;
  Cursor c{buf, h.size(), buf.size()};
  while (c.pos < buf.size()) {
    // An interrupted append leaves a torn tail; drop it.
    if (buf.size() - c.pos < sizeof(uint32_t)) break;
    const uint32_t len = c.get<uint32_t>();
    if (buf.size() - c.pos < len) break;
    out.push_back(c.bytes(len));
  }
  return out;
}

}  // namespace

uint64_t key_hash(const std::string& key) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : key) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

void append_pbs_log(const std::string& path, const std::vector<PbsSample>& samples) {
  std::vector<std::string> records;
  for (const auto& s : samples) {
    std::string r;
    const auto key = public_key(s.pbs.state);
    put<uint32_t>(r, key.size());
    r += key;
    for (int p = 0; p < kNumPlayers; ++p) {
      const auto& b = s.pbs.beliefs[p];
      put<uint32_t>(r, b.size());
      for (size_t h = 0; h < b.size(); ++h) {
        put<uint64_t>(r, key_hash(infostate_key(s.pbs.state, p, h)));
        put<double>(r, b[h]);
        put<double>(r, s.values[p][h]);
      }
    }
    records.push_back(std::move(r));
  }
  append_records(path, kPbsLogMagic, records);
}

std::vector<PbsSample> read_pbs_log(const std::string& path) {
  std::vector<PbsSample> out;
  for (const auto& rec : read_records(path, kPbsLogMagic)) {
    Cursor c{rec, 0, rec.size()};
    PbsSample s;
    s.pbs.state = parse_public_key(c.bytes(c.get<uint32_t>()));
    const int n = num_cards(s.pbs.state.config.kind);
    for (int p = 0; p < kNumPlayers; ++p) {
      s.pbs.beliefs[p].assign(n, 0.0);
      s.values[p].assign(n, 0.0);
      const uint32_t count = c.get<uint32_t>();
      for (uint32_t i = 0; i < count; ++i) {
        const uint64_t hash = c.get<uint64_t>();
        const double belief = c.get<double>();
        const double value = c.get<double>();
        int card = -1;
        for (int h = 0; h < n && card < 0; ++h) {
          if (key_hash(infostate_key(s.pbs.state, p, h)) == hash) card = h;
        }
        if (card < 0) throw Error(ErrorCode::kIo, "unknown infostate hash in " + path);
        s.pbs.beliefs[p][card] = belief;
        s.values[p][card] = value;
      }
    }
    if (c.pos != rec.size()) throw Error(ErrorCode::kIo, "record length mismatch in " + path);
    out.push_back(std::move(s));
  }
  return out;
}

void append_rl_log(const std::string& path, const std::vector<TransitionSample>& samples) {
  std::vector<std::string> records;
  for (const auto& s : samples) {
    std::string r;
    put<uint32_t>(r, s.s.size());
    for (double x : s.s) put<double>(r, x);
    put<uint32_t>(r, s.a.size());
    for (double x : s.a) put<double>(r, x);
    put<double>(r, s.r);
    records.push_back(std::move(r));
  }
  append_records(path, kRlLogMagic, records);
}

std::vector<TransitionSample> read_rl_log(const std::string& path) {
  std::vector<TransitionSample> out;
  for (const auto& rec : read_records(path, kRlLogMagic)) {
    Cursor c{rec, 0, rec.size()};
    TransitionSample s;
    s.s.resize(c.get<uint32_t>());
    for (double& x : s.s) x = c.get<double>();
    s.a.resize(c.get<uint32_t>());
    for (double& x : s.a) x = c.get<double>();
    s.r = c.get<double>();
    if (c.pos != rec.size()) throw Error(ErrorCode::kIo, "record length mismatch in " + path);
    out.push_back(std::move(s));
  }
  return out;
}

void truncate_log(const std::string& path, const char* magic, size_t n_records) {
  const auto records = read_records(path, magic);
  if (n_records > records.size()) throw Error(ErrorCode::kIo, path + " has fewer records than requested");
  const std::string tmp = path + ".tmp";
  std::filesystem::remove(tmp);
  append_records(tmp, magic, std::vector<std::string>(records.begin(), records.begin() + n_records));
  std::filesystem::rename(tmp, path);
}

}  // namespace rlcfr
