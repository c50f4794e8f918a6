// Copyright (c) 2026 The singshift Authors
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

#include "singshift/checkpoint.h"

#include <cstring>
#include <fstream>
#include <system_error>

#include "json.hpp"
#include "singshift/error.h"

namespace singshift {

namespace {

constexpr char kMagic[4] = {'S', 'S', 'C', 'K'};

enum DtypeCode : std::uint8_t { kF32 = 0, kF64 = 1, kI64 = 2 };

DtypeCode CodeFor(torch::Dtype d) {
  switch (d) {
    case torch::kFloat:
      return kF32;
    case torch::kDouble:
      return kF64;
    case torch::kLong:
      return kI64;
    default:
      throw Error(ErrorCode::kUnsupported, "checkpoint tensor dtype not supported");
  }
}

torch::Dtype DtypeFor(std::uint8_t code) {
  switch (code) {
    case kF32:
      return torch::kFloat;
    case kF64:
      return torch::kDouble;
    case kI64:
      return torch::kLong;
    default:
      throw Error(ErrorCode::kCorruption, "unknown tensor dtype code");
  }
}

template <typename T>
void Put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T Get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw Error(ErrorCode::kCorruption, "truncated checkpoint");
  }
  return v;
}

std::string GetString(std::istream& is, std::uint64_t n) {
  if (n > (1ull << 32)) throw Error(ErrorCode::kCorruption, "implausible checkpoint field size");
  std::string s(n, '\0');
  if (n > 0 && !is.read(s.data(), static_cast<std::streamsize>(n))) {
    throw Error(ErrorCode::kCorruption, "truncated checkpoint");
  }
  return s;
}

}  // namespace

const std::string& Checkpoint::Meta(const std::string& key) const {
  auto it = meta.find(key);
  if (it == meta.end()) throw Error(ErrorCode::kCorruption, "checkpoint lacks metadata: " + key);
  return it->second;
}

bool Checkpoint::HasTensor(const std::string& name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return true;
  }
  return false;
}

const torch::Tensor& Checkpoint::Tensor(const std::string& name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return t;
  }
  throw Error(ErrorCode::kCorruption, "checkpoint lacks tensor: " + name);
}

void WriteCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    os.write(kMagic, 4);
    Put<std::uint32_t>(os, kCheckpointVersion);
    const std::string meta = nlohmann::json(ckpt.meta).dump();
    Put<std::uint64_t>(os, meta.size());
    os.write(meta.data(), static_cast<std::streamsize>(meta.size()));
    Put<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.tensors.size()));
    for (const auto& [name, tensor] : ckpt.tensors) {
      const torch::Tensor t = tensor.detach().contiguous().cpu();
      Put<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
      os.write(name.data(), static_cast<std::streamsize>(name.size()));
      Put<std::uint8_t>(os, CodeFor(t.scalar_type()));
      Put<std::uint32_t>(os, static_cast<std::uint32_t>(t.dim()));
      for (auto d : t.sizes()) Put<std::int64_t>(os, d);
      const std::uint64_t bytes = t.numel() * t.element_size();
      Put<std::uint64_t>(os, bytes);
      os.write(static_cast<const char*>(t.data_ptr()), static_cast<std::streamsize>(bytes));
    }
    if (!os) throw Error(ErrorCode::kIo, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename checkpoint into " + path.string());
}

Checkpoint ReadCheckpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open checkpoint " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw Error(ErrorCode::kFormat, "not a checkpoint: " + path.string());
  }
  if (Get<std::uint32_t>(is) != kCheckpointVersion) {
    throw Error(ErrorCode::kUnsupported, "unsupported checkpoint version");
  }
  Checkpoint ckpt;
  const std::string meta = GetString(is, Get<std::uint64_t>(is));
  try {
    ckpt.meta = nlohmann::json::parse(meta).get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruption, std::string("bad checkpoint metadata: ") + e.what());
  }
  const auto count = Get<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = GetString(is, Get<std::uint32_t>(is));
    const torch::Dtype dtype = DtypeFor(Get<std::uint8_t>(is));
    const auto rank = Get<std::uint32_t>(is);
    if (rank > 8) throw Error(ErrorCode::kCorruption, "implausible tensor rank");
    std::vector<std::int64_t> dims(rank);
    std::int64_t numel = 1;
    for (auto& d : dims) {
      d = Get<std::int64_t>(is);
      if (d < 0) throw Error(ErrorCode::kCorruption, "negative tensor dimension");
      numel *= d;
    }
    const auto bytes = Get<std::uint64_t>(is);
    torch::Tensor t = torch::empty(dims, torch::TensorOptions().dtype(dtype));
    if (bytes != static_cast<std::uint64_t>(numel) * t.element_size()) {
      throw Error(ErrorCode::kCorruption, "tensor byte count mismatch for " + name);
    }
    if (bytes > 0 && !is.read(static_cast<char*>(t.data_ptr()), static_cast<std::streamsize>(bytes))) {
      throw Error(ErrorCode::kCorruption, "truncated tensor " + name);
    }
    ckpt.tensors.emplace_back(std::move(name), std::move(t));
  }
  return ckpt;
}

void AddModule(Checkpoint& ckpt, const std::string& prefix, const torch::nn::Module& module) {
  for (const auto& p : module.named_parameters(true)) {
    ckpt.tensors.emplace_back(prefix + p.key(), p.value().detach().clone());
  }
  for (const auto& b : module.named_buffers(true)) {
    ckpt.tensors.emplace_back(prefix + b.key(), b.value().detach().clone());
  }
}

void LoadModule(const Checkpoint& ckpt, const std::string& prefix, torch::nn::Module& module,
                bool allow_resize) {
  torch::NoGradGuard guard;
  auto assign = [&](const std::string& key, torch::Tensor& target) {
    const torch::Tensor& src = ckpt.Tensor(prefix + key);
    if (src.sizes() != target.sizes()) {
      if (allow_resize && src.dim() == target.dim() && src.dim() >= 1) {
        target.set_data(src.to(target.dtype()).clone());
        return;
      }
      throw Error(ErrorCode::kCorruption, "shape mismatch for " + prefix + key);
    }
    target.copy_(src);
  };
  for (auto& p : module.named_parameters(true)) assign(p.key(), p.value());
  for (auto& b : module.named_buffers(true)) assign(b.key(), b.value());
}

void AddAdam(Checkpoint& ckpt, const std::string& prefix, torch::optim::Adam& optimizer) {
  auto& state = optimizer.state();
  std::size_t index = 0;
  for (auto& group : optimizer.param_groups()) {
    for (auto& p : group.params()) {
      const std::string base = prefix + std::to_string(index++);
      auto it = state.find(p.unsafeGetTensorImpl());
      if (it == state.end()) continue;
      auto& s = static_cast<torch::optim::AdamParamState&>(*it->second);
      ckpt.tensors.emplace_back(base + ".step", torch::tensor({s.step()}, torch::kLong));
      ckpt.tensors.emplace_back(base + ".exp_avg", s.exp_avg().detach().clone());
      ckpt.tensors.emplace_back(base + ".exp_avg_sq", s.exp_avg_sq().detach().clone());
    }
  }
}

void LoadAdam(const Checkpoint& ckpt, const std::string& prefix, torch::optim::Adam& optimizer) {
  auto& state = optimizer.state();
  std::size_t index = 0;
  for (auto& group : optimizer.param_groups()) {
    for (auto& p : group.params()) {
      const std::string base = prefix + std::to_string(index++);
      if (!ckpt.HasTensor(base + ".step")) {
        state.erase(p.unsafeGetTensorImpl());
        continue;
      }
      auto s = std::make_unique<torch::optim::AdamParamState>();
      s->step(ckpt.Tensor(base + ".step").item<std::int64_t>());
      const torch::Tensor& m = ckpt.Tensor(base + ".exp_avg");
      const torch::Tensor& v = ckpt.Tensor(base + ".exp_avg_sq");
      if (m.sizes() != p.sizes() || v.sizes() != p.sizes()) {
        throw Error(ErrorCode::kCorruption, "optimizer state shape mismatch at " + base);
      }
      s->exp_avg(m.to(p.dtype()).clone());
      s->exp_avg_sq(v.to(p.dtype()).clone());
      state[p.unsafeGetTensorImpl()] = std::move(s);
    }
  }
}

void CheckModelHash(const Checkpoint& ckpt, const std::string& expected, bool force) {
  const std::string& found = ckpt.Meta("model_hash");
  if (found != expected && !force) {
    throw Error(ErrorCode::kConfig, "checkpoint config hash " + found +
                                        " does not match current config " + expected +
                                        " (use --force to override)");
  }
}

}  // namespace singshift
