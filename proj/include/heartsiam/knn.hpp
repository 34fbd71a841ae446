#pragma once

// Brute-force k-nearest-neighbor scoring over stored reference embeddings.
// The score is the abnormal fraction among the k nearest by Euclidean
// distance; distance ties resolve to the lower reference index.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "heartsiam/common.hpp"

namespace heartsiam {

struct KnnModel {
  int k = 5;
  std::size_t dim = 0;
  std::vector<float> references;  // n x dim, row-major, stored verbatim
  std::vector<Label> labels;

  std::size_t size() const { return labels.size(); }
};

inline KnnModel knn_fit(const std::vector<float>& embeddings, std::size_t dim,
                        const std::vector<Label>& labels, int k) {
  if (dim == 0 || embeddings.size() % dim != 0)
    throw ConfigError("knn_fit: embedding matrix shape mismatch");
  const std::size_t n = embeddings.size() / dim;
  if (n == 0) throw DataError("knn_fit: empty reference set");
  if (labels.size() != n) throw ConfigError("knn_fit: labels do not align with embeddings");
  if (k % 2 == 0) throw ConfigError("knn_fit: k must be odd, got " + std::to_string(k));
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw ConfigError("knn_fit: k must lie in [1, #references]");
  for (Label l : labels)
    if (l == Label::Unknown) throw DataError("knn_fit: reference labels must be Normal/Abnormal");

  KnnModel model;
  model.k = k;
  model.dim = dim;
  model.references = embeddings;
  model.labels = labels;
  return model;
}

inline double knn_score(const KnnModel& model, std::span<const float> query) {
  if (query.size() != model.dim) throw ConfigError("knn_score: embedding dimension mismatch");
  const std::size_t n = model.size();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const float* ref = model.references.data() + i * model.dim;
    double d = 0.0;
    for (std::size_t j = 0; j < model.dim; ++j) {
      const double diff = static_cast<double>(query[j]) - static_cast<double>(ref[j]);
      d += diff * diff;
    }
    dist[i] = {d, i};
  }
  // (distance, index) ordering makes the tie rule explicit
  std::sort(dist.begin(), dist.end());
  std::size_t abnormal = 0;
  for (int i = 0; i < model.k; ++i)
    if (model.labels[dist[static_cast<std::size_t>(i)].second] == Label::Abnormal) ++abnormal;
  return static_cast<double>(abnormal) / static_cast<double>(model.k);
}

inline void save_knn(const std::string& path, const KnnModel& model) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["k"] = model.k;
  j["embedding_dim"] = model.dim;
  nlohmann::json refs = nlohmann::json::array();
  for (std::size_t i = 0; i < model.size(); ++i) {
    std::vector<double> row(model.dim);
    for (std::size_t d = 0; d < model.dim; ++d) row[d] = model.references[i * model.dim + d];
    refs.push_back(row);
  }
  j["references"] = std::move(refs);
  nlohmann::json labels = nlohmann::json::array();
  for (Label l : model.labels) labels.push_back(l == Label::Abnormal ? 1 : -1);
  j["labels"] = std::move(labels);

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("save_knn: cannot open " + path);
  out << j.dump() << "\n";
}

inline KnnModel load_knn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_knn: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("load_knn: invalid JSON in " + path + ": " + e.what());
  }
  const auto dim = j.at("embedding_dim").get<std::size_t>();
  std::vector<float> embeddings;
  for (const auto& row : j.at("references")) {
    if (row.size() != dim) throw DataError("load_knn: reference row width mismatch in " + path);
    for (const auto& v : row) embeddings.push_back(v.get<float>());
  }
  std::vector<Label> labels;
  for (const auto& v : j.at("labels"))
    labels.push_back(v.get<int>() == 1 ? Label::Abnormal : Label::Normal);
  return knn_fit(embeddings, dim, labels, j.at("k").get<int>());
}

}  // namespace heartsiam
