#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "riskcascade/cascade.hpp"
#include "riskcascade/client.hpp"
#include "riskcascade/mlmodels.hpp"
#include "riskcascade/scorers.hpp"

// Batch commands behind the command-line tool. Every command reads a
// PipelineConfig, writes its artifacts into output_dir (atomically) and
// records the resolved configuration beside them.
//
// Config file (JSON, unknown keys rejected, relative paths resolved against
// the config file's directory):
//
//   {
//     "datasets": {"train": "train.jsonl", "val": "val.jsonl",
//                  "test": [{"name": "explicit", "path": "test.jsonl"}]},
//     "routing": {"tau_low": 0.005, "tau_high": 0.995, "max_tokens": 256},
//     "pathway": "ml",                       // or "llm"
//     "stage1": {"kind": "baseline", "epochs": 100, "learning_rate": 1.0,
//                "l2": 1e-6, "bits": 18},    // or {"kind": "remote", "endpoint": url}
//     "roster": ["logistic_regression", "linear_svm", "random_forest",
//                "gradient_boosted_trees"],
//     "hyperparameters": {"random_forest": {"n_trees": 50}},
//     "cv": {"folds": 5, "grid": {"logistic_regression": [{"l2": 1e-4}, {"l2": 1e-2}]}},
//     "cap": 0.5,
//     "optimizer": {"restarts": 16, "initial_step": 0.25, "min_step": 0.001},
//     "analyst": {"kind": "mock", "max_attempts": 3},   // or "http" + "endpoint"
//     "agents": {"kind": "mock", "personas": ["bullish", "bearish", "expert"]},
//     "http": {"max_attempts": 3, "connect_timeout_ms": 5000, "read_timeout_ms": 60000},
//     "parallelism": 1,
//     "cache": "feature_cache.jsonl",
//     "seed": 0,
//     "output_dir": "out",
//     "min_coverage": 0.5,
//     "sweep_grid": [[0.005, 0.995], [0.05, 0.95]]
//   }
//
// The endpoint credential is read from RISKCASCADE_API_KEY only.

namespace riskcascade {

enum class PathwayKind : std::uint8_t { Llm, Ml };

std::string_view to_string(PathwayKind kind) noexcept;

struct NamedPath {
  std::string name;
  std::filesystem::path path;
};

struct ServiceConfig {
  std::string kind = "mock";  // "mock" or "http"
  std::string endpoint;
  std::size_t max_attempts = 3;
};

struct Stage1Config {
  std::string kind = "baseline";  // "baseline" or "remote"
  std::string endpoint;
  BaselineConfig baseline;
};

struct PipelineConfig {
  std::optional<std::filesystem::path> train;
  std::optional<std::filesystem::path> val;
  std::vector<NamedPath> test;
  RoutingConfig routing;
  PathwayKind pathway = PathwayKind::Ml;
  Stage1Config stage1;
  std::vector<ModelKind> roster{kAllModelKinds.begin(), kAllModelKinds.end()};
  std::map<ModelKind, Hyperparams> hyperparams;  // resolved for every roster member
  std::size_t cv_folds = 0;                      // 0 disables the search
  std::map<ModelKind, std::vector<Hyperparams>> cv_grid;
  double cap = 0.5;
  OptimizerOptions optimizer;
  ServiceConfig analyst;
  ServiceConfig agents;
  std::vector<AgentPersona> personas{AgentPersona::Bullish, AgentPersona::Bearish,
                                     AgentPersona::Expert};
  HttpOptions http;
  std::size_t parallelism = 1;
  std::filesystem::path cache;  // empty → output_dir/feature_cache.jsonl
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  double min_coverage = 0.5;
  std::vector<std::pair<double, double>> sweep_grid = default_threshold_grid();
};

/// Throws ParseError or SchemaError (naming the offending key).
PipelineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

/// Fully defaulted config as pretty-printed JSON with absolute paths.
std::string resolved_config_json(const PipelineConfig& config);

/// Artifact locations inside output_dir.
std::filesystem::path cache_path(const PipelineConfig& config);
std::filesystem::path matrix_path(const PipelineConfig& config, std::string_view dataset);
std::filesystem::path stage1_model_path(const PipelineConfig& config);
std::filesystem::path model_path(const PipelineConfig& config, ModelKind kind);
std::filesystem::path weights_path(const PipelineConfig& config);

/// Commands return a process exit code; progress goes to `out`, problems to `err`.
int cmd_extract(const PipelineConfig& config, std::ostream& out, std::ostream& err);
int cmd_train(const PipelineConfig& config, std::ostream& out, std::ostream& err);
int cmd_route(const PipelineConfig& config, std::ostream& out, std::ostream& err);
int cmd_evaluate(const PipelineConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep_thresholds(const PipelineConfig& config, std::ostream& out, std::ostream& err);

}  // namespace riskcascade
