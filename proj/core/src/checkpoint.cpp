// Copyright 2026 The qfc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qfc/rl/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "qfc/errors.hpp"

namespace qfc::rl {
namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

std::string join(const std::vector<int>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(xs[i]);
  }
  return s;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

[[noreturn]] void malformed(const std::filesystem::path& path, const std::string& what) {
  throw IoError("checkpoint " + path.string() + ": " + what);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, Scenario scenario,
                     const ActorCritic& model, const std::map<std::string, std::string>& meta) {
  const ArchConfig& a = model.arch();
  std::ostringstream head;
  head << kCheckpointVersion << '\n';
  head << "scenario " << to_string(scenario) << '\n';
  head << "observation " << to_string(a.observation_kind) << '\n';
  head << "obs_dim " << a.obs_dim << '\n';
  head << "hidden " << join(a.hidden) << '\n';
  head << "lstm_hidden " << a.lstm_hidden << '\n';
  head << "stop_head " << (a.stop_head ? 1 : 0) << '\n';
  for (const auto& [k, v] : meta) {
    if (k.find_first_of(" \n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw ParameterError("checkpoint meta keys must be single words");
    }
    head << "meta " << k << ' ' << v << '\n';
  }
  model.params().visit([&head](const std::string& name, const double*, Eigen::Index r,
                               Eigen::Index c) {
    head << "tensor " << name << ' ' << r << ' ' << c << '\n';
  });
  const Vector flat = model.params().flatten();
  head << "blob " << flat.size() << '\n';

  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  const std::string text = head.str();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(flat[i]));
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    out.write(bytes, 8);
  }
  if (!out) throw IoError("failed while writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw MissingCheckpoint("checkpoint not found: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());

  std::string line;
  if (!std::getline(in, line) || line != kCheckpointVersion) malformed(path, "bad version line");

  Checkpoint ck;
  std::vector<std::tuple<std::string, long, long>> tensors;
  long blob = -1;
  bool have_scenario = false;
  while (blob < 0 && std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "scenario") {
      std::string v;
      ls >> v;
      try {
        ck.scenario = parse_scenario(v);
      } catch (const Error&) {
        malformed(path, "unknown scenario '" + v + "'");
      }
      have_scenario = true;
    } else if (key == "observation") {
      std::string v;
      ls >> v;
      if (v == "full_state") {
        ck.arch.observation_kind = ObservationKind::kFullState;
      } else if (v == "outcome_pair") {
        ck.arch.observation_kind = ObservationKind::kOutcomePair;
      } else {
        malformed(path, "unknown observation kind '" + v + "'");
      }
    } else if (key == "obs_dim") {
      ls >> ck.arch.obs_dim;
    } else if (key == "hidden") {
      std::string v;
      ls >> v;
      ck.arch.hidden = split_ints(v);
    } else if (key == "lstm_hidden") {
      ls >> ck.arch.lstm_hidden;
    } else if (key == "stop_head") {
      int v = 0;
      ls >> v;
      ck.arch.stop_head = v != 0;
    } else if (key == "meta") {
      std::string k;
      ls >> k;
      std::string v;
      std::getline(ls >> std::ws, v);
      ck.meta[k] = v;
    } else if (key == "tensor") {
      std::string name;
      long r = 0, c = 0;
      ls >> name >> r >> c;
      tensors.emplace_back(name, r, c);
    } else if (key == "blob") {
      ls >> blob;
    } else {
      malformed(path, "unknown manifest line '" + line + "'");
    }
    if (ls.fail()) malformed(path, "cannot parse line '" + line + "'");
  }
  if (!have_scenario || blob < 0) malformed(path, "incomplete manifest");

  try {
    ck.params = NetworkParams::zeros(ck.arch);
  } catch (const Error& e) {
    malformed(path, e.what());
  }
  std::size_t idx = 0;
  bool shapes_ok = true;
  ck.params.visit([&](const std::string& name, const double*, Eigen::Index r, Eigen::Index c) {
    if (idx >= tensors.size()) {
      shapes_ok = false;
      return;
    }
    const auto& [tn, tr, tc] = tensors[idx++];
    if (tn != name || tr != r || tc != c) shapes_ok = false;
  });
  if (!shapes_ok || idx != tensors.size()) malformed(path, "tensor list does not match the architecture");
  if (blob != ck.params.size()) malformed(path, "blob size does not match the tensors");

  Vector flat(blob);
  for (long i = 0; i < blob; ++i) {
    char bytes[8];
    if (!in.read(bytes, 8)) malformed(path, "truncated blob");
    std::uint64_t bits = 0;
    std::memcpy(&bits, bytes, 8);
    flat[i] = std::bit_cast<double>(to_little_endian(bits));
  }
  if (in.peek() != std::char_traits<char>::eof()) malformed(path, "trailing bytes after blob");
  if (!flat.allFinite()) malformed(path, "non-finite parameters");
  ck.params.unflatten(flat);
  return ck;
}

}  // namespace qfc::rl
