// Copyright 2026 The crm-active Authors
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

#include "crmactive/cli.hpp"

#include <pthread.h>

#include <csignal>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "crmactive/dataset.hpp"
#include "crmactive/engine.hpp"
#include "crmactive/error.hpp"
#include "crmactive/evaluation.hpp"
#include "crmactive/exports.hpp"
#include "crmactive/http_server.hpp"
#include "crmactive/session_manager.hpp"
#include "crmactive/synthetic.hpp"

namespace crmactive {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string dataset;
  std::string config;
  std::optional<std::uint64_t> seed;
};

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error("cannot write " + path.string());
}

template <typename Fn>
void write_stream(const fs::path& path, Fn&& fn) {
  std::ostringstream buf;
  fn(buf);
  write_file(path, buf.str());
}

RunConfig load_config(const CommonOptions& opts) {
  RunConfig config = opts.config.empty() ? RunConfig{} : config_from_json(read_json_file(opts.config));
  if (opts.seed) config.seed = *opts.seed;
  return config;
}

void write_history(const fs::path& dir, const std::string& stem, const std::vector<RoundMetrics>& history,
                   const std::vector<std::string>& vocab) {
  write_stream(dir / (stem + ".csv"), [&](std::ostream& o) { write_metrics_csv(o, history); });
  write_stream(dir / (stem + "_concepts.csv"), [&](std::ostream& o) { write_concept_csv(o, history, vocab); });
}

int cmd_run(const CommonOptions& opts, const fs::path& out_dir, const std::string& strategy_name,
            std::ostream& out) {
  const Dataset dataset = load_dataset(opts.dataset);
  const RunConfig config = load_config(opts);
  const Strategy strategy = strategy_name == "random" ? Strategy::random : Strategy::crm_active;
  GroundTruthOracle oracle;
  const SessionResult result = run_session(dataset, config, oracle, strategy);

  fs::create_directories(out_dir);
  const auto vocab = dataset.concept_names();
  write_stream(out_dir / "metrics.csv", [&](std::ostream& o) { write_metrics_csv(o, result.history); });
  write_stream(out_dir / "concept_precision.csv",
               [&](std::ostream& o) { write_concept_csv(o, result.history, vocab); });
  write_stream(out_dir / "scores.csv",
               [&](std::ostream& o) { write_score_csv(o, result.score_dumps, result.batches); });
  write_file(out_dir / "labeling_order.json", labeling_order_json(result.labeling_order).dump(2) + "\n");
  write_file(out_dir / "clusters.json", result.clusters.dump(2) + "\n");
  const nlohmann::json model = {{"vocabulary", vocab},
                                {"normalization", to_json(dataset.normalization())},
                                {"annotation_length", config.annotation_length},
                                {"retrieval_depth", config.retrieval_depth},
                                {"config", to_json(config)},
                                {"model", result.model}};
  write_file(out_dir / "model.json", model.dump() + "\n");

  const auto& last = result.history.back();
  out << "rounds: " << result.history.size() << "\n"
      << "final annotation AP: " << last.annotation_ap << "\n"
      << "final retrieval AP: " << last.retrieval_ap << "\n"
      << "outputs: " << out_dir.string() << "\n";
  return kExitOk;
}

int cmd_baseline(const CommonOptions& opts, const fs::path& out_dir, const std::vector<std::uint64_t>& seeds,
                 std::ostream& out) {
  const Dataset dataset = load_dataset(opts.dataset);
  const RunConfig config = load_config(opts);
  const BaselineResult result = run_baseline_random(dataset, config, seeds);

  fs::create_directories(out_dir);
  const auto vocab = dataset.concept_names();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    write_history(out_dir, "baseline_seed_" + std::to_string(seeds[i]), result.per_seed[i], vocab);
  }
  write_history(out_dir, "baseline_averaged", result.averaged, vocab);
  out << "seeds: " << seeds.size() << "\n"
      << "final averaged annotation AP: " << result.averaged.back().annotation_ap << "\n";
  return kExitOk;
}

int cmd_serve(const std::string& bind, const fs::path& data_dir, std::ostream& out, std::ostream& err) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) {
    err << "--bind must be host:port\n";
    return kExitUsage;
  }
  const std::string host = bind.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(bind.substr(colon + 1));
  } catch (const std::exception&) {
    err << "invalid port in --bind\n";
    return kExitUsage;
  }

  SessionManager manager(data_dir);
  const RecoveryReport report = manager.recover();
  for (const auto& [id, why] : report.rejected) err << "not loaded: " << id << ": " << why << "\n";
  out << "recovered " << report.recovered.size() << " session(s)\n";

  // Block the stop signals here so the server thread inherits the mask and
  // this thread can wait for them synchronously.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  HttpServer server(manager);
  const int bound = port == 0 ? server.bind_any_port(host) : (server.bind(host, port) ? port : -1);
  if (bound < 0) {
    err << "cannot bind " << bind << "\n";
    pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
    return kExitRuntime;
  }
  out << "listening on " << host << ":" << bound << std::endl;
  std::thread worker([&] { server.listen_after_bind(); });
  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  worker.join();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  return kExitOk;
}

int cmd_synth(const SyntheticSpec& spec, const fs::path& out_path, std::ostream& out) {
  const Dataset dataset = generate_synthetic(spec);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  save_dataset(dataset, out_path);
  out << "wrote " << dataset.samples().size() << " samples to " << out_path.string() << "\n";
  return kExitOk;
}

int cmd_eval(const fs::path& model_path, const std::string& dataset_path, std::ostream& out) {
  const nlohmann::json doc = read_json_file(model_path);
  const Dataset dataset = load_dataset(dataset_path);
  RelevanceModel model = [&] {
    try {
      return RelevanceModel::from_json(doc.at("model"));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(model_path.string() + ": " + e.what());
    }
  }();
  std::vector<std::string> vocab;
  NormalizationStats stats;
  std::size_t k = 0;
  std::size_t t = 0;
  try {
    vocab = doc.at("vocabulary").get<std::vector<std::string>>();
    stats = normalization_from_json(doc.at("normalization"));
    k = doc.at("annotation_length").get<std::size_t>();
    t = doc.at("retrieval_depth").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(model_path.string() + ": " + e.what());
  }
  if (vocab != dataset.concept_names()) throw DataError("dataset vocabulary differs from the model's");
  if (stats.mean.size() != dataset.feature_dim()) throw DataError("dataset feature dimension differs from the model's");

  // Test features are normalized with the statistics the model was trained under.
  std::vector<Sample> test;
  for (const Sample* s : dataset.test_samples()) {
    Sample copy = *s;
    copy.features = stats.apply(copy.raw_features);
    test.push_back(std::move(copy));
  }
  if (t > test.size()) throw DataError("retrieval depth exceeds the test set size");
  std::vector<const Sample*> ptrs;
  for (const auto& s : test) ptrs.push_back(&s);

  const PrecisionResult annotation = evaluate_annotation(model, ptrs, k);
  const PrecisionResult retrieval = evaluate_retrieval(model, ptrs, t);
  nlohmann::json per_concept = nlohmann::json::object();
  for (std::size_t w = 0; w < vocab.size(); ++w) per_concept[vocab[w]] = annotation.per_concept[w];
  const nlohmann::json report = {{"test_samples", test.size()},
                                 {"annotation_ap", annotation.mean},
                                 {"retrieval_ap", retrieval.mean},
                                 {"per_concept_precision", per_concept}};
  out << report.dump(2) << "\n";
  return kExitOk;
}

int cmd_inspect(const CommonOptions& opts, std::size_t rounds, const std::string& out_path, std::ostream& out) {
  const Dataset dataset = load_dataset(opts.dataset);
  const RunConfig config = load_config(opts);
  Session session(dataset, config);
  session.start();
  GroundTruthOracle oracle;
  for (std::size_t r = 0; r < rounds && session.status() == SessionStatus::awaiting_labels; ++r) {
    std::map<SampleId, LabelSet> labels;
    for (const auto& id : session.current_batch()) labels.emplace(id, oracle.label(dataset.sample(id)));
    session.complete_round(labels);
  }
  const nlohmann::json doc = {{"round", session.round()},
                              {"clusters", cluster_summary(session.clusters(), session.store(), session.entropy_params())}};
  if (out_path.empty()) {
    out << doc.dump(2) << "\n";
  } else {
    write_file(out_path, doc.dump(2) + "\n");
  }
  return kExitOk;
}

void configure_logging(int verbosity) {
  auto logger = spdlog::get("crm-active");
  if (!logger) {
    logger = spdlog::stderr_color_mt("crm-active");
    spdlog::set_default_logger(logger);
  }
  spdlog::set_level(verbosity >= 2 ? spdlog::level::debug
                    : verbosity == 1 ? spdlog::level::info
                                     : spdlog::level::warn);
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_config = true) {
  cmd->add_option("--dataset", opts.dataset, "Dataset file (.json, or .csv with a .splits.json sidecar)")->required();
  if (with_config) {
    cmd->add_option("--config", opts.config, "Run configuration JSON");
    cmd->add_option("--seed", opts.seed, "Override the configuration seed");
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Active learning with a normalized continuous relevance model", "crm-active"};
  app.require_subcommand(1);
  app.fallthrough();
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "Log progress to stderr (-vv adds cluster entropies)");

  CommonOptions run_opts;
  std::string run_out = "out";
  std::string strategy = "crm_active";
  auto* run = app.add_subcommand("run", "Run a session against the ground-truth oracle");
  add_common(run, run_opts);
  run->add_option("--out-dir", run_out, "Output directory")->capture_default_str();
  run->add_option("--strategy", strategy, "Selection strategy")
      ->check(CLI::IsMember({"crm_active", "random"}))
      ->capture_default_str();

  CommonOptions base_opts;
  std::string base_out = "out";
  std::vector<std::uint64_t> seeds{1, 2, 3};
  auto* baseline = app.add_subcommand("baseline", "Random-selection baseline averaged over seeds");
  add_common(baseline, base_opts);
  baseline->add_option("--out-dir", base_out, "Output directory")->capture_default_str();
  baseline->add_option("--seeds", seeds, "Comma separated seeds")->delimiter(',')->capture_default_str();

  std::string bind = "127.0.0.1:8080";
  std::string data_dir = "crm-active-data";
  auto* serve = app.add_subcommand("serve", "Serve the interactive labeling API");
  serve->add_option("--bind", bind, "host:port (port 0 picks a free port)")->capture_default_str();
  serve->add_option("--data-dir", data_dir, "Journal directory")->capture_default_str();

  SyntheticSpec spec;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic blob dataset");
  synth->add_option("--clusters", spec.n_clusters, "Number of blobs")->capture_default_str();
  synth->add_option("--per-cluster", spec.samples_per_cluster, "Samples per blob")->capture_default_str();
  synth->add_option("--concepts", spec.num_concepts, "Vocabulary size")->capture_default_str();
  synth->add_option("--dim", spec.feature_dim, "Feature dimension")->capture_default_str();
  synth->add_option("--noise", spec.label_noise, "Label flip probability")->capture_default_str();
  synth->add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
  synth->add_option("--center-scale", spec.center_scale, "Stddev of blob centres")->capture_default_str();
  synth->add_option("--spread", spec.cluster_spread, "Within-blob stddev")->capture_default_str();
  synth->add_option("--test-fraction", spec.test_fraction, "Fraction held out for testing")
      ->capture_default_str();
  synth->add_option("--initial-fraction", spec.initial_fraction, "Fraction labeled up front")
      ->capture_default_str();
  synth->add_option("--out", synth_out, "Output file (.json or .csv)")->required();

  std::string model_path;
  std::string eval_dataset;
  auto* eval = app.add_subcommand("eval", "Re-score a saved model on a dataset's test split");
  eval->add_option("--model", model_path, "model.json written by run")->required();
  eval->add_option("--dataset", eval_dataset, "Dataset file")->required();

  CommonOptions inspect_opts;
  std::size_t inspect_rounds = 0;
  std::string inspect_out;
  auto* inspect = app.add_subcommand("inspect-clusters", "Dump the cluster state as JSON");
  add_common(inspect, inspect_opts);
  inspect->add_option("--rounds", inspect_rounds, "Oracle rounds to run first")->capture_default_str();
  inspect->add_option("--out", inspect_out, "Output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  configure_logging(verbosity);

  try {
    if (*run) return cmd_run(run_opts, run_out, strategy, out);
    if (*baseline) return cmd_baseline(base_opts, base_out, seeds, out);
    if (*serve) return cmd_serve(bind, data_dir, out, err);
    if (*synth) return cmd_synth(spec, synth_out, out);
    if (*eval) return cmd_eval(model_path, eval_dataset, out);
    if (*inspect) return cmd_inspect(inspect_opts, inspect_rounds, inspect_out, out);
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace crmactive
