#pragma once

// Model checkpoints: a JSON document with the architecture, the loss
// configuration, and named tensors as {shape, row-major data}. Loading
// validates every tensor shape against the architecture.

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "heartsiam/common.hpp"
#include "heartsiam/loss.hpp"
#include "heartsiam/net.hpp"

namespace heartsiam {

inline constexpr int kCheckpointVersion = 1;

inline nlohmann::json arch_to_json(const ArchConfig& arch) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : arch.blocks) blocks.push_back({b.out_channels, b.kernel, b.pool});
  return {{"in_channels", arch.in_channels},
          {"in_length", arch.in_length},
          {"conv_blocks", blocks},
          {"embedding_dim", arch.embedding_dim},
          {"l2_normalize", arch.l2_normalize}};
}

inline ArchConfig arch_from_json(const nlohmann::json& j) {
  ArchConfig arch;
  arch.in_channels = j.at("in_channels").get<int>();
  arch.in_length = j.at("in_length").get<int>();
  arch.blocks.clear();
  for (const auto& b : j.at("conv_blocks")) {
    if (!b.is_array() || b.size() != 3)
      throw DataError("checkpoint: conv block must be [channels, kernel, pool]");
    arch.blocks.push_back({b[0].get<int>(), b[1].get<int>(), b[2].get<int>()});
  }
  arch.embedding_dim = j.at("embedding_dim").get<int>();
  arch.l2_normalize = j.at("l2_normalize").get<bool>();
  arch.validate();
  return arch;
}

inline std::map<std::string, std::vector<int>> checkpoint_shapes(const ArchConfig& arch) {
  std::map<std::string, std::vector<int>> shapes;
  int in_ch = arch.in_channels;
  for (std::size_t b = 0; b < arch.blocks.size(); ++b) {
    const auto& blk = arch.blocks[b];
    shapes["conv" + std::to_string(b) + ".weight"] = {blk.out_channels, in_ch, blk.kernel};
    shapes["conv" + std::to_string(b) + ".bias"] = {blk.out_channels};
    in_ch = blk.out_channels;
  }
  shapes["dense.weight"] = {arch.embedding_dim, in_ch};
  shapes["dense.bias"] = {arch.embedding_dim};
  return shapes;
}

template <typename T>
void save_checkpoint(const std::string& path, const NetParams<T>& params, const LossConfig& loss) {
  nlohmann::json j;
  j["format_version"] = kCheckpointVersion;
  j["arch"] = arch_to_json(params.arch);
  j["loss"] = {{"alpha", loss.alpha}};
  nlohmann::json tensors;
  auto shapes = checkpoint_shapes(params.arch);
  params.for_each_tensor([&](const std::string& name, const std::vector<T>& data) {
    nlohmann::json t;
    t["shape"] = shapes.at(name);
    t["data"] = std::vector<double>(data.begin(), data.end());
    tensors[name] = std::move(t);
  });
  j["tensors"] = std::move(tensors);

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("save_checkpoint: cannot open " + path);
  out << j.dump(2) << "\n";
}

template <typename T>
struct Checkpoint {
  NetParams<T> params;
  LossConfig loss;
};

template <typename T>
Checkpoint<T> load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_checkpoint: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("load_checkpoint: invalid JSON in " + path + ": " + e.what());
  }
  if (j.at("format_version").get<int>() != kCheckpointVersion)
    throw DataError("load_checkpoint: unsupported format version in " + path);

  Checkpoint<T> out;
  out.params.arch = arch_from_json(j.at("arch"));
  out.params = NetParams<T>::zeros_like(out.params.arch);
  out.loss.alpha = j.at("loss").at("alpha").get<double>();
  out.loss.validate();

  const auto shapes = checkpoint_shapes(out.params.arch);
  const auto& tensors = j.at("tensors");
  out.params.for_each_tensor([&](const std::string& name, std::vector<T>& data) {
    if (!tensors.contains(name)) throw DataError("load_checkpoint: missing tensor " + name);
    const auto& t = tensors.at(name);
    const auto shape = t.at("shape").get<std::vector<int>>();
    if (shape != shapes.at(name)) throw DataError("load_checkpoint: shape mismatch for " + name);
    const auto& values = t.at("data");
    std::size_t expected = 1;
    for (int d : shape) expected *= static_cast<std::size_t>(d);
    if (values.size() != expected || data.size() != expected)
      throw DataError("load_checkpoint: data size mismatch for " + name);
    for (std::size_t i = 0; i < expected; ++i) data[i] = static_cast<T>(values[i].get<double>());
  });
  return out;
}

}  // namespace heartsiam
