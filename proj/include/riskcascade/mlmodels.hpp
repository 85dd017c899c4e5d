#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "riskcascade/analysis.hpp"
#include "riskcascade/core.hpp"

namespace riskcascade {

enum class ModelKind : std::uint8_t {
  LogisticRegression,
  LinearSVM,
  RandomForest,
  GradientBoostedTrees,
};

inline constexpr std::array<ModelKind, 4> kAllModelKinds = {
    ModelKind::LogisticRegression, ModelKind::LinearSVM, ModelKind::RandomForest,
    ModelKind::GradientBoostedTrees};

/// "logistic_regression", "linear_svm", "random_forest", "gradient_boosted_trees".
std::string_view to_string(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept;

/// Union of every learner's knobs; each kind reads only its own.
///
/// Defaults (see default_hyperparams):
///   logistic_regression     learning_rate 0.1, l2 1e-4, epochs 300
///   linear_svm              learning_rate 0.1, svm_lambda 1e-4, epochs 300
///   random_forest           n_trees 100, max_depth 6, max_features floor(sqrt(9)) = 3
///   gradient_boosted_trees  n_rounds 100, max_depth 3, shrinkage 0.1
struct Hyperparams {
  double learning_rate = 0.1;
  double l2 = 1e-4;
  std::size_t epochs = 300;
  double svm_lambda = 1e-4;
  std::size_t n_trees = 100;
  std::size_t max_depth = 6;
  /// 0 selects floor(sqrt(feature count)).
  std::size_t max_features = 0;
  std::size_t n_rounds = 100;
  double shrinkage = 0.1;
  std::size_t min_samples_leaf = 1;

  bool operator==(const Hyperparams&) const = default;
};

Hyperparams default_hyperparams(ModelKind kind);

/// Per-feature affine map x -> (x - mean) / scale fitted on training rows.
struct Standardizer {
  std::array<double, kFeatureDim> mean{};
  std::array<double, kFeatureDim> scale{};

  static Standardizer fit(const FeatureMatrix& X);
  static Standardizer identity();
  FeatureVector apply(const FeatureVector& x) const;
};

/// Weights live in standardised feature space.
struct LinearParams {
  std::array<double, kFeatureDim> weights{};
  double bias = 0.0;
  Standardizer standardizer = Standardizer::identity();
};

/// Leaf iff feature < 0. Rows with x[feature] <= threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  double evaluate(const FeatureVector& x) const;
};

/// Random forest: leaves hold 0/1 votes. Gradient boosting: leaves hold
/// shrunken log-odds increments added to base_score.
struct TreeEnsemble {
  std::vector<Tree> trees;
  double base_score = 0.0;
};

class TrainedModel {
public:
  using Params = std::variant<LinearParams, TreeEnsemble>;

  TrainedModel(ModelKind kind, Hyperparams hp, std::uint64_t seed, Params params);

  ModelKind kind() const noexcept { return kind_; }
  const Hyperparams& hyperparams() const noexcept { return hp_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const Params& params() const noexcept { return params_; }

  /// Versioned JSON dump: magic, kind, seed, feature dimension, parameters.
  std::string serialize() const;
  static TrainedModel deserialize(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path);

private:
  ModelKind kind_;
  Hyperparams hp_;
  std::uint64_t seed_;
  Params params_;
};

/// LR: sigmoid of the linear score. LinearSVM: sigmoid of the margin (an
/// uncalibrated surrogate). RF: fraction of trees voting positive.
/// GBT: sigmoid of base score plus summed leaf values.
Probability predict_proba(const TrainedModel& model, const FeatureVector& x);
/// Dynamic-size overload; throws DimensionError unless x has 9 entries.
Probability predict_proba(const TrainedModel& model, std::span<const double> x);

/// Throws DegenerateData (single class) or PreconditionError (fewer than two
/// rows, size mismatch, or rows violating the feature-vector invariants).
TrainedModel train(ModelKind kind, const FeatureMatrix& X, std::span<const Label> y,
                   const Hyperparams& hp, std::uint64_t seed);

/// Average logistic loss plus (l2 / 2)·|w|² over rows already in the model's
/// input space. theta = (w_0..w_8, bias).
struct LogisticObjective {
  const FeatureMatrix& X;
  std::span<const Label> y;
  double l2 = 0.0;

  double value(std::span<const double> theta) const;
  std::vector<double> gradient(std::span<const double> theta) const;
};

struct CvResult {
  Hyperparams best;
  std::size_t best_index = 0;
  double best_mean_f1 = 0.0;
  std::vector<double> mean_f1;  // one per grid point
};

/// Stratified k-fold search over `grid`; the first grid point with the
/// highest mean validation F1 wins.
CvResult cross_validate(ModelKind kind, const FeatureMatrix& X, std::span<const Label> y,
                        std::size_t folds, std::span<const Hyperparams> grid, std::uint64_t seed);

/// Stratified fold index per row (0..folds-1), seeded.
std::vector<std::size_t> stratified_folds(std::span<const Label> y, std::size_t folds,
                                          std::uint64_t seed);

}  // namespace riskcascade
