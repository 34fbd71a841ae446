// heartsiam CLI: synth | prepare | train | evaluate | predict.
//
// Every command reads one JSON config; any config key can be overridden on
// the command line with dotted paths, e.g. `--training.epochs 5` or
// `--sampler.anchor_domains '["a","b"]'`. `--seed` overrides every section
// seed at once. Exit codes: 0 success, 1 usage/config error, 2 data error,
// 3 numeric failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heartsiam/pipeline.hpp"

namespace {

using heartsiam::PipelineConfig;

struct CommonArgs {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  bool has_seed = false;
  std::uint64_t seed = 0;
  int jobs = 1;
};

// leftover tokens become dotted-path config overrides
void collect_overrides(std::vector<std::string> extras, CommonArgs& args) {
  // CLI11 yields remaining tokens in reverse order
  std::reverse(extras.begin(), extras.end());
  for (std::size_t i = 0; i < extras.size(); ++i) {
    std::string token = extras[i];
    if (token.rfind("--", 0) != 0)
      throw heartsiam::ConfigError("unrecognized argument '" + token + "'");
    token = token.substr(2);
    const auto eq = token.find('=');
    if (eq != std::string::npos) {
      args.overrides.emplace_back(token.substr(0, eq), token.substr(eq + 1));
    } else {
      if (i + 1 >= extras.size())
        throw heartsiam::ConfigError("override '--" + token + "' is missing a value");
      args.overrides.emplace_back(token, extras[++i]);
    }
  }
}

PipelineConfig load(const CommonArgs& args) {
  auto overrides = args.overrides;
  if (args.has_seed) {
    const std::string s = std::to_string(args.seed);
    overrides.emplace_back("sampler.seed", s);
    overrides.emplace_back("training.seed", s);
    overrides.emplace_back("classifier.seed", s);
    overrides.emplace_back("synth.seed", s);
  }
  return heartsiam::load_config(args.config_path, overrides);
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "pipeline config JSON");
  cmd->add_option("--seed", args.seed, "override sampler/training/classifier/synth seeds")
      ->each([&args](const std::string&) { args.has_seed = true; });
  cmd->add_option("--jobs", args.jobs, "worker threads for per-record stages")
      ->check(CLI::PositiveNumber);
  cmd->allow_extras();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HeartSiam: domain-invariant heart-sound classification"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string out_dir, manifest, wav_path, domain = "a";

  CLI::App* synth = app.add_subcommand(
      "synth",
      "Generate a synthetic dataset (WAVs + manifest + annotations).\n"
      "Config keys: synth.profiles, synth.n_per_class, synth.cell_counts,\n"
      "synth.duration_s, synth.seed, paths.output_dir");
  add_common(synth, args);
  synth->add_option("--out", out_dir, "output directory (default <output_dir>/dataset)");

  CLI::App* prepare = app.add_subcommand(
      "prepare",
      "Resample, despike, decompose, segment, and cache cycle segments.\n"
      "Config keys: paths.manifest, paths.cache_dir, processing.*,\n"
      "segmentation.*");
  add_common(prepare, args);
  prepare->add_option("--manifest", manifest, "manifest to prepare (default paths.manifest)");

  CLI::App* train = app.add_subcommand(
      "train",
      "Train one embedding model per anchor domain and store KNN references.\n"
      "Config keys: paths.manifest, paths.cache_dir, paths.output_dir,\n"
      "sampler.*, training.*, classifier.*");
  add_common(train, args);

  CLI::App* evaluate = app.add_subcommand(
      "evaluate",
      "Score a manifest with the trained ensemble and write metrics.\n"
      "Config keys: paths.cache_dir, paths.output_dir, sampler.anchor_domains,\n"
      "classifier.threshold");
  add_common(evaluate, args);
  evaluate->add_option("--manifest", manifest, "manifest to evaluate (default paths.manifest)");

  CLI::App* predict = app.add_subcommand(
      "predict",
      "Classify a single WAV recording.\n"
      "Config keys: paths.cache_dir, paths.output_dir, processing.*,\n"
      "segmentation.*, sampler.anchor_domains, classifier.threshold");
  add_common(predict, args);
  predict->add_option("--wav", wav_path, "input recording")->required();
  predict->add_option("--domain", domain, "domain letter recorded in outputs (default a)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    collect_overrides(cmd->remaining(), args);
    const PipelineConfig cfg = load(args);

    if (cmd == synth) {
      const std::string dir =
          out_dir.empty() ? (std::filesystem::path(cfg.paths.output_dir) / "dataset").string()
                          : out_dir;
      const heartsiam::SynthDataset ds = heartsiam::run_synth(cfg, dir);
      std::cout << ds.manifest_path << "\n";
    } else if (cmd == prepare) {
      const std::string m = manifest.empty() ? cfg.paths.manifest : manifest;
      const heartsiam::PrepareStats stats = heartsiam::run_prepare(cfg, m, args.jobs);
      std::cout << "prepared " << (stats.records.size() - stats.failures) << "/"
                << stats.records.size() << " records\n";
    } else if (cmd == train) {
      heartsiam::run_train(cfg);
      std::cout << "trained " << cfg.sampler.anchor_domains.size() << " branches into "
                << cfg.paths.output_dir << "\n";
    } else if (cmd == evaluate) {
      const std::string m = manifest.empty() ? cfg.paths.manifest : manifest;
      const heartsiam::EvalOutput out = heartsiam::run_evaluate(cfg, m, args.jobs);
      heartsiam::print_report(out.report, std::cout);
      std::cout << "metrics: " << out.metrics_path << "\n";
    } else if (cmd == predict) {
      if (domain.size() != 1 || !heartsiam::valid_domain(domain[0]))
        throw heartsiam::ConfigError("predict: --domain must be a letter a-f");
      const heartsiam::PredictResult res = heartsiam::run_predict(cfg, wav_path, domain[0]);
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6f", res.pred.score);
      std::cout << res.record_id << " " << buf << " " << heartsiam::label_name(res.pred.label)
                << "\n";
    }
    return 0;
  } catch (const heartsiam::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const heartsiam::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const heartsiam::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
