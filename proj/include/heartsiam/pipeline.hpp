#pragma once

// End-to-end orchestration shared by the CLI and the acceptance suite:
// synth -> prepare (resample, despike, decompose, segment, cache) ->
// train (triplets, CNN, KNN references) -> evaluate / predict.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "heartsiam/annotations.hpp"
#include "heartsiam/bands.hpp"
#include "heartsiam/checkpoint.hpp"
#include "heartsiam/config.hpp"
#include "heartsiam/cycles.hpp"
#include "heartsiam/emission.hpp"
#include "heartsiam/ensemble.hpp"
#include "heartsiam/knn.hpp"
#include "heartsiam/manifest.hpp"
#include "heartsiam/metrics.hpp"
#include "heartsiam/resample.hpp"
#include "heartsiam/sampler.hpp"
#include "heartsiam/segment.hpp"
#include "heartsiam/spikes.hpp"
#include "heartsiam/synth.hpp"
#include "heartsiam/train.hpp"
#include "heartsiam/wav.hpp"

namespace heartsiam {

namespace detail {

// Deterministic parallel map: slot-indexed results, any scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> threads;
  const int count = std::min<int>(jobs, static_cast<int>(n));
  threads.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
}

inline std::string cache_path(const PipelineConfig& cfg, const std::string& record_id) {
  return (std::filesystem::path(cfg.paths.cache_dir) / (record_id + ".hssg")).string();
}

inline std::string emission_path(const PipelineConfig& cfg) {
  return (std::filesystem::path(cfg.paths.cache_dir) / "emission.json").string();
}

inline std::string model_path(const PipelineConfig& cfg, char domain) {
  return (std::filesystem::path(cfg.paths.output_dir) / (std::string("model_") + domain + ".json"))
      .string();
}

inline std::string knn_path(const PipelineConfig& cfg, char domain) {
  return (std::filesystem::path(cfg.paths.output_dir) / (std::string("knn_") + domain + ".json"))
      .string();
}

}  // namespace detail

// ---- emission model persistence --------------------------------------------

inline void save_emission(const std::string& path, const EmissionModel& model) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["n_features"] = model.n_features;
  j["n_states"] = model.n_states;
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["feat_mean"] = model.feat_mean;
  j["feat_std"] = model.feat_std;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("save_emission: cannot open " + path);
  out << j.dump() << "\n";
}

inline EmissionModel load_emission(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_emission: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("load_emission: invalid JSON in " + path + ": " + e.what());
  }
  EmissionModel m;
  m.n_features = j.at("n_features").get<std::size_t>();
  m.n_states = j.at("n_states").get<std::size_t>();
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<std::vector<double>>();
  m.feat_mean = j.at("feat_mean").get<std::vector<double>>();
  m.feat_std = j.at("feat_std").get<std::vector<double>>();
  if (m.weights.size() != m.n_states * m.n_features || m.bias.size() != m.n_states)
    throw DataError("load_emission: inconsistent shapes in " + path);
  return m;
}

// ---- record processing ------------------------------------------------------

struct ProcessedRecord {
  std::vector<double> samples;  // at the processing rate, despiked
  BandStack bands;
};

inline ProcessedRecord process_record(const PipelineConfig& cfg, std::vector<double> samples,
                                      double fs_in) {
  normalize_samples(samples);
  std::vector<double> resampled = resample_to_rate(samples, fs_in, cfg.processing.fs);
  ProcessedRecord out;
  out.samples = remove_spikes(resampled, cfg.processing.fs, cfg.processing.spike);
  out.bands = decompose(out.samples, cfg.processing.fs, cfg.processing.band_edges);
  return out;
}

// ---- synth ------------------------------------------------------------------

inline SynthDataset run_synth(const PipelineConfig& cfg, const std::string& out_dir) {
  SynthDatasetConfig scfg;
  scfg.profiles = cfg.synth.profiles;
  scfg.n_per_class = cfg.synth.n_per_class;
  scfg.cell_counts = cfg.synth.cell_counts;
  scfg.duration_s = cfg.synth.duration_s;
  scfg.seed = cfg.synth.seed;
  return gen_dataset(scfg, out_dir);
}

// ---- prepare ----------------------------------------------------------------

struct RecordPrepareInfo {
  std::string record_id;
  std::size_t cycles = 0;
  bool low_confidence = false;
  bool failed = false;
  std::string error;
  StateSequence decoded;
};

struct PrepareStats {
  std::vector<RecordPrepareInfo> records;
  std::size_t failures = 0;
  bool fitted_emission = false;
};

inline std::string default_annotations_path(const PipelineConfig& cfg,
                                            const std::string& manifest_path) {
  if (!cfg.segmentation.annotations.empty()) return cfg.segmentation.annotations;
  return (std::filesystem::path(manifest_path).parent_path() / "annotations.csv").string();
}

// Fits the per-state logistic emissions from every annotated record in the
// manifest.
inline EmissionModel fit_emission_from_annotations(const PipelineConfig& cfg,
                                                   const DatasetIndex& index,
                                                   const AnnotationMap& annotations) {
  std::vector<double> frames;
  std::vector<int> labels;
  for (const auto& rec : index.records) {
    auto it = annotations.find(rec.record_id);
    if (it == annotations.end()) continue;
    const WavData wav = load_wav(rec.path);
    const ProcessedRecord processed = process_record(cfg, wav.samples, wav.fs);
    const FeatureMatrix feats =
        feature_matrix(processed.samples, cfg.processing.fs, cfg.segmentation.feature_rate);
    const std::size_t n = std::min(feats.rows, it->second.size());
    for (std::size_t t = 0; t < n; ++t) {
      frames.push_back(feats.at(t, 0));
      frames.push_back(feats.at(t, 1));
      labels.push_back(it->second[t]);
    }
  }
  if (labels.empty())
    throw DataError("prepare: no annotated records found to fit the emission model "
                    "(annotation CSV missing?)");
  EmissionTrainConfig ecfg;
  ecfg.iterations = cfg.segmentation.emission_iterations;
  ecfg.step = cfg.segmentation.emission_step;
  ecfg.l2 = cfg.segmentation.emission_l2;
  return fit_emission(frames, 2, labels, kNumHeartStates, ecfg);
}

inline PrepareStats run_prepare(const PipelineConfig& cfg, const std::string& manifest_path,
                                int jobs = 1, std::ostream& log = std::cerr) {
  if (manifest_path.empty()) throw ConfigError("prepare: no manifest configured");
  const DatasetIndex index = load_manifest(manifest_path);
  if (index.records.empty()) throw DataError("prepare: manifest lists no records");
  std::filesystem::create_directories(cfg.paths.cache_dir);

  PrepareStats stats;

  // Emission model: reuse a cached fit when present so evaluation manifests
  // are segmented with the training-set emissions.
  EmissionModel emission;
  const std::string emission_file = detail::emission_path(cfg);
  if (std::filesystem::exists(emission_file)) {
    emission = load_emission(emission_file);
  } else {
    const std::string ann_path = default_annotations_path(cfg, manifest_path);
    if (!std::filesystem::exists(ann_path))
      throw DataError("prepare: no emission model at " + emission_file +
                      " and no annotations at " + ann_path);
    emission = fit_emission_from_annotations(cfg, index, load_annotations(ann_path));
    save_emission(emission_file, emission);
    stats.fitted_emission = true;
  }

  SegmentationConfig seg_cfg;
  seg_cfg.feature_rate = cfg.segmentation.feature_rate;
  seg_cfg.durations = cfg.segmentation.durations;

  stats.records.assign(index.records.size(), {});
  detail::parallel_for(index.records.size(), jobs, [&](std::size_t i) {
    const auto& rec = index.records[i];
    RecordPrepareInfo& info = stats.records[i];
    info.record_id = rec.record_id;
    try {
      const WavData wav = load_wav(rec.path);
      const ProcessedRecord processed = process_record(cfg, wav.samples, wav.fs);
      info.decoded = segment_record(processed.samples, cfg.processing.fs, emission, seg_cfg);
      const ExtractResult cycles =
          extract_cycles(processed.bands, info.decoded, rec.record_id, rec.domain, rec.label);
      write_segment_cache(detail::cache_path(cfg, rec.record_id), cycles.segments);
      info.cycles = cycles.segments.size();
      info.low_confidence = info.decoded.low_confidence || cycles.no_onset;
    } catch (const std::exception& e) {
      info.failed = true;
      info.error = e.what();
    }
  });

  for (const auto& info : stats.records) {
    if (info.failed) {
      ++stats.failures;
      log << "prepare: " << info.record_id << ": error: " << info.error << "\n";
    } else {
      log << "prepare: " << info.record_id << ": " << info.cycles << " cycles"
          << (info.low_confidence ? " (low confidence)" : "") << "\n";
    }
  }
  if (stats.failures == stats.records.size())
    throw DataError("prepare: every record failed");
  return stats;
}

// ---- pool loading -----------------------------------------------------------

inline SegmentPool load_pool(const PipelineConfig& cfg, const DatasetIndex& index) {
  SegmentPool pool;
  for (const auto& rec : index.records) {
    std::vector<CycleSegment> segments = read_segment_cache(detail::cache_path(cfg, rec.record_id));
    for (auto& seg : segments) {
      seg.record_id = rec.record_id;
      seg.domain = rec.domain;
      seg.label = rec.label;
      pool.add(std::move(seg));
    }
  }
  return pool;
}

inline std::vector<char> effective_partner_domains(const PipelineConfig& cfg,
                                                   const SegmentPool& pool) {
  if (!cfg.sampler.partner_domains.empty()) return cfg.sampler.partner_domains;
  std::set<char> present;
  for (const auto& [cell, indices] : pool.by_cell)
    if (!indices.empty()) present.insert(cell.first);
  return std::vector<char>(present.begin(), present.end());
}

// ---- train ------------------------------------------------------------------

struct TrainStats {
  std::vector<char> domains;
  std::vector<std::vector<double>> loss_traces;
};

inline TrainStats run_train(const PipelineConfig& cfg, std::ostream& log = std::cerr) {
  if (cfg.paths.manifest.empty()) throw ConfigError("train: no manifest configured");
  const DatasetIndex index = load_manifest(cfg.paths.manifest);
  const SegmentPool pool = load_pool(cfg, index);
  if (pool.segments.empty()) throw DataError("train: segment cache is empty; run prepare first");
  std::filesystem::create_directories(cfg.paths.output_dir);

  LossConfig loss_cfg;
  loss_cfg.alpha = cfg.training.alpha;

  TrainStats stats;
  for (char domain : cfg.sampler.anchor_domains) {
    SamplerConfig scfg;
    scfg.anchor_domain = domain;
    scfg.partner_domains = effective_partner_domains(cfg, pool);
    scfg.n_blocks = cfg.sampler.n_blocks;
    scfg.seed = cfg.sampler.seed;
    const std::vector<Triplet> triplets = build_training_set(pool, scfg);

    TrainConfig tcfg;
    tcfg.epochs = cfg.training.epochs;
    tcfg.batch_size = cfg.training.batch_size;
    tcfg.lr = cfg.training.lr;
    tcfg.loss = loss_cfg;
    tcfg.seed = rng::chain(cfg.training.seed, static_cast<std::uint64_t>(domain));
    log << "train: domain " << domain << ": " << triplets.size() << " triplets\n";
    const TrainResult<float> result = train<float>(pool, triplets, cfg.training.arch, tcfg);
    save_checkpoint(detail::model_path(cfg, domain), result.params, loss_cfg);
    if (!result.epoch_loss.empty())
      log << "train: domain " << domain << ": first epoch loss " << result.epoch_loss.front()
          << ", last " << result.epoch_loss.back() << "\n";

    stats.domains.push_back(domain);
    stats.loss_traces.push_back(result.epoch_loss);
  }

  // one class-balanced reference subset, embedded by every branch
  const std::vector<std::size_t> subset =
      balanced_subset(pool, cfg.classifier.per_class, cfg.classifier.seed);
  for (char domain : cfg.sampler.anchor_domains) {
    const Checkpoint<float> ckpt = load_checkpoint<float>(detail::model_path(cfg, domain));
    const auto dim = static_cast<std::size_t>(ckpt.params.arch.embedding_dim);
    std::vector<float> embeddings(subset.size() * dim);
    std::vector<Label> labels(subset.size());
    detail::parallel_for(subset.size(), 1, [&](std::size_t i) {
      const CycleSegment& seg = pool.segments[subset[i]];
      const std::vector<float> e = forward(ckpt.params, seg);
      std::copy(e.begin(), e.end(), embeddings.begin() + static_cast<std::ptrdiff_t>(i * dim));
      labels[i] = seg.label;
    });
    save_knn(detail::knn_path(cfg, domain),
             knn_fit(embeddings, dim, labels, cfg.classifier.k));
  }

  // loss trace CSV
  const auto trace_path = std::filesystem::path(cfg.paths.output_dir) / "loss_traces.csv";
  std::ofstream trace(trace_path, std::ios::trunc);
  trace << "domain,epoch,loss\n";
  for (std::size_t d = 0; d < stats.domains.size(); ++d)
    for (std::size_t e = 0; e < stats.loss_traces[d].size(); ++e) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", stats.loss_traces[d][e]);
      trace << stats.domains[d] << "," << e << "," << buf << "\n";
    }
  return stats;
}

// ---- evaluate ---------------------------------------------------------------

inline EnsembleModel load_ensemble(const PipelineConfig& cfg) {
  EnsembleModel ens;
  ens.threshold = cfg.classifier.threshold;
  for (char domain : cfg.sampler.anchor_domains) {
    const std::string mpath = detail::model_path(cfg, domain);
    if (!std::filesystem::exists(mpath))
      throw DataError(std::string("evaluate: missing checkpoint for branch ") + domain + " at " +
                      mpath);
    Branch branch;
    branch.anchor_domain = domain;
    branch.params = load_checkpoint<float>(mpath).params;
    branch.knn = load_knn(detail::knn_path(cfg, domain));
    ens.branches.push_back(std::move(branch));
  }
  ens.validate();
  return ens;
}

struct EvalOutput {
  EvalReport report;
  std::vector<std::string> skipped;  // records with no cached segments
  std::string metrics_path;
  std::string per_record_path;
};

inline EvalOutput run_evaluate(const PipelineConfig& cfg, const std::string& manifest_path,
                               int jobs = 1, std::ostream& log = std::cerr) {
  if (manifest_path.empty()) throw ConfigError("evaluate: no manifest configured");
  const DatasetIndex index = load_manifest(manifest_path);
  if (index.records.empty()) throw DataError("evaluate: manifest lists no records");
  const EnsembleModel ens = load_ensemble(cfg);
  std::filesystem::create_directories(cfg.paths.output_dir);

  struct Row {
    bool skipped = false;
    Prediction pred;
  };
  std::vector<Row> rows(index.records.size());
  detail::parallel_for(index.records.size(), jobs, [&](std::size_t i) {
    const auto& rec = index.records[i];
    const std::vector<CycleSegment> segments =
        read_segment_cache(detail::cache_path(cfg, rec.record_id));
    if (segments.empty()) {
      rows[i].skipped = true;
      return;
    }
    rows[i].pred = ensemble_predict(ens, segments);
  });

  EvalOutput out;
  std::vector<Label> preds, labels;
  std::vector<char> domains;
  std::ofstream csv;
  out.per_record_path =
      (std::filesystem::path(cfg.paths.output_dir) / "per_record.csv").string();
  csv.open(out.per_record_path, std::ios::trunc);
  csv << "record_id,domain,label,score,prediction\n";
  for (std::size_t i = 0; i < index.records.size(); ++i) {
    const auto& rec = index.records[i];
    if (rows[i].skipped) {
      out.skipped.push_back(rec.record_id);
      log << "evaluate: " << rec.record_id << ": no segments in cache, skipped\n";
      continue;
    }
    preds.push_back(rows[i].pred.label);
    labels.push_back(rec.label);
    domains.push_back(rec.domain);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", rows[i].pred.score);
    csv << rec.record_id << "," << rec.domain << "," << label_name(rec.label) << "," << buf << ","
        << label_name(rows[i].pred.label) << "\n";
  }
  if (preds.empty()) throw DataError("evaluate: no records had cached segments");
  out.report = evaluate(preds, labels, domains);

  out.metrics_path = (std::filesystem::path(cfg.paths.output_dir) / "metrics.json").string();
  std::ofstream mj(out.metrics_path, std::ios::trunc);
  mj << report_to_json(out.report).dump(2) << "\n";
  return out;
}

// Table-style summary mirroring the per-domain accuracy columns.
inline void print_report(const EvalReport& r, std::ostream& os) {
  auto pct = [](const std::optional<double>& v) {
    if (!v) return std::string("   n/a");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%6.2f", *v * 100.0);
    return std::string(buf);
  };
  os << "Accuracy in data domains";
  for (const auto& [domain, acc] : r.per_domain_accuracy) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "  %c=%.2f", domain, acc * 100.0);
    os << buf;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "  Avg=%.2f", r.accuracy * 100.0);
  os << buf << "\n";
  os << "Sens. " << pct(r.sensitivity) << "  Spec. " << pct(r.specificity) << "  Macc "
     << pct(r.macc) << "\n";
}

// ---- predict ----------------------------------------------------------------

struct PredictResult {
  std::string record_id;
  Prediction pred;
  std::size_t cycles = 0;
};

inline PredictResult run_predict(const PipelineConfig& cfg, const std::string& wav_path,
                                 char domain) {
  const EnsembleModel ens = load_ensemble(cfg);
  const EmissionModel emission = load_emission(detail::emission_path(cfg));

  PredictResult out;
  out.record_id = std::filesystem::path(wav_path).stem().string();
  const WavData wav = load_wav(wav_path);
  const ProcessedRecord processed = process_record(cfg, wav.samples, wav.fs);

  SegmentationConfig seg_cfg;
  seg_cfg.feature_rate = cfg.segmentation.feature_rate;
  seg_cfg.durations = cfg.segmentation.durations;
  const StateSequence seq =
      segment_record(processed.samples, cfg.processing.fs, emission, seg_cfg);
  const ExtractResult cycles =
      extract_cycles(processed.bands, seq, out.record_id, domain, Label::Unknown);
  if (cycles.segments.empty())
    throw DataError("predict: no cardiac cycles detected in " + wav_path);
  out.cycles = cycles.segments.size();
  out.pred = ensemble_predict(ens, cycles.segments);
  return out;
}

}  // namespace heartsiam
