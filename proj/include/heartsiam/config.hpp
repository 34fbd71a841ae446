#pragma once

// Pipeline configuration: one JSON document with per-section defaults.
// Unknown keys are rejected at every level; CLI dotted-path overrides
// (e.g. training.epochs=5) are applied to the document before parsing.

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "heartsiam/bands.hpp"
#include "heartsiam/common.hpp"
#include "heartsiam/heartrate.hpp"
#include "heartsiam/net.hpp"
#include "heartsiam/spikes.hpp"
#include "heartsiam/synth.hpp"

namespace heartsiam {

struct PipelineConfig {
  struct Paths {
    std::string manifest;
    std::string cache_dir = "cache";
    std::string output_dir = "out";
  } paths;

  struct Processing {
    double fs = 1000.0;
    BandEdges band_edges = kDefaultBandEdges;
    SpikeConfig spike;
  } processing;

  struct Segmentation {
    double feature_rate = 50.0;
    DurationConfig durations;
    int emission_iterations = 500;
    double emission_step = 0.1;
    double emission_l2 = 1e-4;
    std::string annotations;  // optional; default <manifest dir>/annotations.csv
  } segmentation;

  struct Sampler {
    std::vector<char> anchor_domains = {'a', 'b', 'c', 'd', 'e'};
    std::vector<char> partner_domains;  // empty = every domain present in the data
    std::size_t n_blocks = 10000;
    std::uint64_t seed = 101;
  } sampler;

  struct Training {
    ArchConfig arch;
    double alpha = 0.5;
    double lr = 1e-4;
    int epochs = 30;
    int batch_size = 32;
    std::uint64_t seed = 202;
  } training;

  struct Classifier {
    int k = 5;
    std::size_t per_class = 500;
    double threshold = 0.5;
    std::uint64_t seed = 303;
  } classifier;

  struct Synth {
    std::vector<SynthProfile> profiles;
    std::size_t n_per_class = 40;
    std::map<std::pair<char, Label>, std::size_t> cell_counts;
    double duration_s = 10.0;
    std::uint64_t seed = 404;
  } synth;
};

namespace detail {

inline void require_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!j.is_object()) throw ConfigError("config: " + where + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw ConfigError("config: unknown key '" + where + (where.empty() ? "" : ".") + key + "'");
}

template <typename T>
void get_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(std::string("config: bad value for '") + key + "'");
    }
  }
}

inline char parse_domain(const nlohmann::json& v, const std::string& where) {
  const auto s = v.get<std::string>();
  if (s.size() != 1 || !valid_domain(s[0]))
    throw ConfigError("config: " + where + ": '" + s + "' is not a domain letter a-f");
  return s[0];
}

inline std::vector<char> parse_domain_list(const nlohmann::json& v, const std::string& where) {
  std::vector<char> out;
  for (const auto& d : v) out.push_back(parse_domain(d, where));
  return out;
}

inline SynthProfile parse_profile(const nlohmann::json& j) {
  require_keys(j, {"domain", "color_center_hz", "color_width_hz", "noise_rms", "s1_freq_hz",
                   "s1_dur_s", "s2_freq_hz", "s2_dur_s", "cycle_mean_s", "cycle_std_s",
                   "murmur_lo_hz", "murmur_hi_hz", "murmur_ratio"},
               "synth.profiles[]");
  SynthProfile p;
  if (j.contains("domain")) p.domain = parse_domain(j.at("domain"), "synth.profiles[].domain");
  get_if(j, "color_center_hz", p.color_center_hz);
  get_if(j, "color_width_hz", p.color_width_hz);
  get_if(j, "noise_rms", p.noise_rms);
  get_if(j, "s1_freq_hz", p.s1_freq_hz);
  get_if(j, "s1_dur_s", p.s1_dur_s);
  get_if(j, "s2_freq_hz", p.s2_freq_hz);
  get_if(j, "s2_dur_s", p.s2_dur_s);
  get_if(j, "cycle_mean_s", p.cycle_mean_s);
  get_if(j, "cycle_std_s", p.cycle_std_s);
  get_if(j, "murmur_lo_hz", p.murmur_lo_hz);
  get_if(j, "murmur_hi_hz", p.murmur_hi_hz);
  get_if(j, "murmur_ratio", p.murmur_ratio);
  p.validate();
  return p;
}

}  // namespace detail

// Three distinguishable sensors at desk scale.
inline std::vector<SynthProfile> default_synth_profiles() {
  SynthProfile a;
  a.domain = 'a';
  a.color_center_hz = 140.0;
  a.color_width_hz = 260.0;
  a.noise_rms = 0.015;
  SynthProfile b;
  b.domain = 'b';
  b.color_center_hz = 190.0;
  b.color_width_hz = 340.0;
  b.noise_rms = 0.035;
  b.s1_freq_hz = 55.0;
  b.s2_freq_hz = 95.0;
  b.cycle_mean_s = 0.9;
  SynthProfile c;
  c.domain = 'c';
  c.color_center_hz = 120.0;
  c.color_width_hz = 200.0;
  c.noise_rms = 0.025;
  c.s1_freq_hz = 65.0;
  c.s2_freq_hz = 85.0;
  c.cycle_mean_s = 0.7;
  return {a, b, c};
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
  detail::require_keys(
      j, {"paths", "processing", "segmentation", "sampler", "training", "classifier", "synth"},
      "");
  PipelineConfig cfg;
  cfg.synth.profiles = default_synth_profiles();

  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    detail::require_keys(p, {"manifest", "cache_dir", "output_dir"}, "paths");
    detail::get_if(p, "manifest", cfg.paths.manifest);
    detail::get_if(p, "cache_dir", cfg.paths.cache_dir);
    detail::get_if(p, "output_dir", cfg.paths.output_dir);
  }
  if (j.contains("processing")) {
    const auto& p = j.at("processing");
    detail::require_keys(p, {"fs", "band_edges", "spike_window_s", "spike_threshold"},
                         "processing");
    detail::get_if(p, "fs", cfg.processing.fs);
    if (p.contains("band_edges")) {
      const auto& edges = p.at("band_edges");
      if (!edges.is_array() || edges.size() != 4)
        throw ConfigError("config: processing.band_edges must list exactly 4 bands");
      for (std::size_t k = 0; k < 4; ++k) {
        if (!edges[k].is_array() || edges[k].size() != 2)
          throw ConfigError("config: processing.band_edges[" + std::to_string(k) +
                            "] must be [lo, hi]");
        cfg.processing.band_edges[k] = {edges[k][0].get<double>(), edges[k][1].get<double>()};
      }
    }
    detail::get_if(p, "spike_window_s", cfg.processing.spike.window_s);
    detail::get_if(p, "spike_threshold", cfg.processing.spike.threshold);
  }
  if (j.contains("segmentation")) {
    const auto& p = j.at("segmentation");
    detail::require_keys(p,
                         {"feature_rate", "s1_mean_s", "s2_mean_s", "duration_std_frac",
                          "min_duration_s", "max_duration_factor", "emission_iterations",
                          "emission_step", "emission_l2", "annotations"},
                         "segmentation");
    detail::get_if(p, "feature_rate", cfg.segmentation.feature_rate);
    detail::get_if(p, "s1_mean_s", cfg.segmentation.durations.s1_mean_s);
    detail::get_if(p, "s2_mean_s", cfg.segmentation.durations.s2_mean_s);
    detail::get_if(p, "duration_std_frac", cfg.segmentation.durations.std_frac);
    detail::get_if(p, "min_duration_s", cfg.segmentation.durations.min_duration_s);
    detail::get_if(p, "max_duration_factor", cfg.segmentation.durations.max_factor);
    detail::get_if(p, "emission_iterations", cfg.segmentation.emission_iterations);
    detail::get_if(p, "emission_step", cfg.segmentation.emission_step);
    detail::get_if(p, "emission_l2", cfg.segmentation.emission_l2);
    detail::get_if(p, "annotations", cfg.segmentation.annotations);
  }
  if (j.contains("sampler")) {
    const auto& p = j.at("sampler");
    detail::require_keys(p, {"anchor_domains", "partner_domains", "n_blocks", "seed"}, "sampler");
    if (p.contains("anchor_domains"))
      cfg.sampler.anchor_domains =
          detail::parse_domain_list(p.at("anchor_domains"), "sampler.anchor_domains");
    if (p.contains("partner_domains"))
      cfg.sampler.partner_domains =
          detail::parse_domain_list(p.at("partner_domains"), "sampler.partner_domains");
    detail::get_if(p, "n_blocks", cfg.sampler.n_blocks);
    detail::get_if(p, "seed", cfg.sampler.seed);
    if (cfg.sampler.n_blocks < 1) throw ConfigError("config: sampler.n_blocks must be >= 1");
    if (cfg.sampler.anchor_domains.empty())
      throw ConfigError("config: sampler.anchor_domains must not be empty");
  }
  if (j.contains("training")) {
    const auto& p = j.at("training");
    detail::require_keys(p, {"arch", "alpha", "lr", "epochs", "batch_size", "seed"}, "training");
    if (p.contains("arch")) {
      const auto& a = p.at("arch");
      detail::require_keys(a, {"conv_blocks", "embedding_dim", "l2_normalize"}, "training.arch");
      if (a.contains("conv_blocks")) {
        cfg.training.arch.blocks.clear();
        for (const auto& b : a.at("conv_blocks")) {
          if (!b.is_array() || b.size() != 3)
            throw ConfigError("config: training.arch.conv_blocks entries must be "
                              "[channels, kernel, pool]");
          cfg.training.arch.blocks.push_back({b[0].get<int>(), b[1].get<int>(), b[2].get<int>()});
        }
      }
      detail::get_if(a, "embedding_dim", cfg.training.arch.embedding_dim);
      detail::get_if(a, "l2_normalize", cfg.training.arch.l2_normalize);
    }
    detail::get_if(p, "alpha", cfg.training.alpha);
    detail::get_if(p, "lr", cfg.training.lr);
    detail::get_if(p, "epochs", cfg.training.epochs);
    detail::get_if(p, "batch_size", cfg.training.batch_size);
    detail::get_if(p, "seed", cfg.training.seed);
    cfg.training.arch.validate();
    if (cfg.training.alpha < 0.0) throw ConfigError("config: training.alpha must be >= 0");
    if (cfg.training.epochs < 0) throw ConfigError("config: training.epochs must be >= 0");
    if (cfg.training.batch_size < 1) throw ConfigError("config: training.batch_size must be >= 1");
  }
  if (j.contains("classifier")) {
    const auto& p = j.at("classifier");
    detail::require_keys(p, {"k", "per_class", "threshold", "seed"}, "classifier");
    detail::get_if(p, "k", cfg.classifier.k);
    detail::get_if(p, "per_class", cfg.classifier.per_class);
    detail::get_if(p, "threshold", cfg.classifier.threshold);
    detail::get_if(p, "seed", cfg.classifier.seed);
    if (cfg.classifier.k < 1 || cfg.classifier.k % 2 == 0)
      throw ConfigError("config: classifier.k must be odd and positive");
  }
  if (j.contains("synth")) {
    const auto& p = j.at("synth");
    detail::require_keys(p, {"profiles", "n_per_class", "cell_counts", "duration_s", "seed"},
                         "synth");
    if (p.contains("profiles")) {
      cfg.synth.profiles.clear();
      for (const auto& prof : p.at("profiles"))
        cfg.synth.profiles.push_back(detail::parse_profile(prof));
    }
    detail::get_if(p, "n_per_class", cfg.synth.n_per_class);
    detail::get_if(p, "duration_s", cfg.synth.duration_s);
    detail::get_if(p, "seed", cfg.synth.seed);
    if (p.contains("cell_counts")) {
      for (const auto& [domain_key, counts] : p.at("cell_counts").items()) {
        if (domain_key.size() != 1 || !valid_domain(domain_key[0]))
          throw ConfigError("config: synth.cell_counts key '" + domain_key +
                            "' is not a domain letter");
        detail::require_keys(counts, {"normal", "abnormal"}, "synth.cell_counts." + domain_key);
        if (counts.contains("normal"))
          cfg.synth.cell_counts[{domain_key[0], Label::Normal}] =
              counts.at("normal").get<std::size_t>();
        if (counts.contains("abnormal"))
          cfg.synth.cell_counts[{domain_key[0], Label::Abnormal}] =
              counts.at("abnormal").get<std::size_t>();
      }
    }
  }
  return cfg;
}

// Applies one `key.path=value` override; the value is parsed as JSON when
// possible and kept as a string otherwise.
inline void apply_override(nlohmann::json& doc, const std::string& dotted,
                           const std::string& value) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(value);
  } catch (const nlohmann::json::exception&) {
    parsed = value;
  }
  nlohmann::json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    if (key.empty()) throw ConfigError("config: bad override path '" + dotted + "'");
    if (dot == std::string::npos) {
      (*node)[key] = parsed;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

inline PipelineConfig load_config(const std::string& path,
                                  const std::vector<std::pair<std::string, std::string>>&
                                      overrides = {}) {
  nlohmann::json doc = nlohmann::json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config: invalid JSON in " + path + ": " + e.what());
    }
  }
  for (const auto& [key, value] : overrides) apply_override(doc, key, value);
  return config_from_json(doc);
}

}  // namespace heartsiam
