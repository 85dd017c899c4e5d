#include "riskcascade/mlmodels.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "riskcascade/eval.hpp"
#include "riskcascade/util.hpp"

namespace riskcascade {

using nlohmann::json;

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::LogisticRegression: return "logistic_regression";
    case ModelKind::LinearSVM: return "linear_svm";
    case ModelKind::RandomForest: return "random_forest";
    case ModelKind::GradientBoostedTrees: return "gradient_boosted_trees";
  }
  return "logistic_regression";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept {
  for (auto k : kAllModelKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

Hyperparams default_hyperparams(ModelKind kind) {
  Hyperparams hp;
  if (kind == ModelKind::GradientBoostedTrees) {
    hp.max_depth = 3;
  }
  return hp;
}

// ---------------------------------------------------------------------------
// Standardizer

Standardizer Standardizer::fit(const FeatureMatrix& X) {
  Standardizer s;
  const double n = static_cast<double>(X.size());
  for (std::size_t k = 0; k < kFeatureDim; ++k) {
    double mean = 0.0;
    for (const auto& row : X) mean += row[k];
    mean /= n;
    double var = 0.0;
    for (const auto& row : X) var += (row[k] - mean) * (row[k] - mean);
    var /= n;
    s.mean[k] = mean;
    s.scale[k] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

Standardizer Standardizer::identity() {
  Standardizer s;
  s.scale.fill(1.0);
  return s;
}

FeatureVector Standardizer::apply(const FeatureVector& x) const {
  FeatureVector out;
  for (std::size_t k = 0; k < kFeatureDim; ++k) out[k] = (x[k] - mean[k]) / scale[k];
  return out;
}

double Tree::evaluate(const FeatureVector& x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                       : n.right);
  }
  return nodes[i].value;
}

// ---------------------------------------------------------------------------
// Logistic objective

namespace {

double linear_score(std::span<const double> theta, const FeatureVector& x) {
  double z = theta[kFeatureDim];
  for (std::size_t k = 0; k < kFeatureDim; ++k) z += theta[k] * x[k];
  return z;
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double target(Label l) { return l == Label::Suicide ? 1.0 : 0.0; }

}  // namespace

double LogisticObjective::value(std::span<const double> theta) const {
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double z = linear_score(theta, X[i]);
    // -[y log s(z) + (1-y) log(1-s(z))] = softplus(z) - y z
    loss += softplus(z) - target(y[i]) * z;
  }
  double sq = 0.0;
  for (std::size_t k = 0; k < kFeatureDim; ++k) sq += theta[k] * theta[k];
  return loss / static_cast<double>(X.size()) + 0.5 * l2 * sq;
}

std::vector<double> LogisticObjective::gradient(std::span<const double> theta) const {
  std::vector<double> g(kFeatureDim + 1, 0.0);
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double r = sigmoid(linear_score(theta, X[i])) - target(y[i]);
    for (std::size_t k = 0; k < kFeatureDim; ++k) g[k] += r * X[i][k];
    g[kFeatureDim] += r;
  }
  const double n = static_cast<double>(X.size());
  for (std::size_t k = 0; k < kFeatureDim; ++k) g[k] = g[k] / n + l2 * theta[k];
  g[kFeatureDim] /= n;
  return g;
}

// ---------------------------------------------------------------------------
// Learners

namespace {

LinearParams train_logistic(const FeatureMatrix& X, std::span<const Label> y, const Hyperparams& hp) {
  LinearParams p;
  p.standardizer = Standardizer::fit(X);
  FeatureMatrix Z;
  Z.reserve(X.size());
  for (const auto& row : X) Z.push_back(p.standardizer.apply(row));
  const LogisticObjective obj{Z, y, hp.l2};
  std::vector<double> theta(kFeatureDim + 1, 0.0);
  for (std::size_t e = 0; e < hp.epochs; ++e) {
    const auto g = obj.gradient(theta);
    for (std::size_t k = 0; k <= kFeatureDim; ++k) theta[k] -= hp.learning_rate * g[k];
  }
  std::copy_n(theta.begin(), kFeatureDim, p.weights.begin());
  p.bias = theta[kFeatureDim];
  return p;
}

// Full-batch subgradient descent on lambda/2 |w|^2 + mean hinge, step lr/sqrt(t).
LinearParams train_svm(const FeatureMatrix& X, std::span<const Label> y, const Hyperparams& hp) {
  LinearParams p;
  p.standardizer = Standardizer::fit(X);
  FeatureMatrix Z;
  Z.reserve(X.size());
  for (const auto& row : X) Z.push_back(p.standardizer.apply(row));
  const double n = static_cast<double>(Z.size());
  std::array<double, kFeatureDim> w{};
  double b = 0.0;
  for (std::size_t t = 1; t <= hp.epochs; ++t) {
    std::array<double, kFeatureDim> gw{};
    double gb = 0.0;
    for (std::size_t i = 0; i < Z.size(); ++i) {
      const double yi = y[i] == Label::Suicide ? 1.0 : -1.0;
      double z = b;
      for (std::size_t k = 0; k < kFeatureDim; ++k) z += w[k] * Z[i][k];
      if (yi * z < 1.0) {
        for (std::size_t k = 0; k < kFeatureDim; ++k) gw[k] -= yi * Z[i][k];
        gb -= yi;
      }
    }
    const double step = hp.learning_rate / std::sqrt(static_cast<double>(t));
    for (std::size_t k = 0; k < kFeatureDim; ++k) {
      w[k] -= step * (gw[k] / n + hp.svm_lambda * w[k]);
    }
    b -= step * gb / n;
  }
  p.weights = w;
  p.bias = b;
  return p;
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Scans candidate features in ascending index order and thresholds in
// ascending order, keeping only strict improvements; equal gains therefore
// resolve to the lowest feature index, then the lowest threshold.
template <typename Criterion>
SplitChoice best_split(const FeatureMatrix& X, const std::vector<std::size_t>& rows,
                       const std::vector<std::size_t>& features, std::size_t min_leaf,
                       const Criterion& criterion) {
  SplitChoice best;
  const double parent = criterion.node_score(rows);
  std::vector<std::size_t> sorted = rows;
  for (auto f : features) {
    std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
      return X[a][f] < X[b][f] || (X[a][f] == X[b][f] && a < b);
    });
    auto acc = criterion.empty();
    auto total = criterion.accumulate(rows);
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      criterion.add(acc, sorted[i]);
      const double lo = X[sorted[i]][f];
      const double hi = X[sorted[i + 1]][f];
      if (lo == hi) continue;
      const std::size_t n_left = i + 1;
      const std::size_t n_right = sorted.size() - n_left;
      if (n_left < min_leaf || n_right < min_leaf) continue;
      const double gain = criterion.split_score(acc, total) - parent;
      if (gain > best.gain + 1e-12) {
        best.feature = static_cast<int>(f);
        best.threshold = 0.5 * (lo + hi);
        best.gain = gain;
      }
    }
  }
  return best;
}

// Gini criterion; scores are negated weighted impurities so larger is better.
struct GiniCriterion {
  std::span<const Label> y;
  struct Acc {
    double n = 0, pos = 0;
  };
  Acc empty() const { return {}; }
  void add(Acc& a, std::size_t i) const {
    a.n += 1;
    a.pos += y[i] == Label::Suicide ? 1 : 0;
  }
  Acc accumulate(const std::vector<std::size_t>& rows) const {
    Acc a;
    for (auto i : rows) add(a, i);
    return a;
  }
  static double weighted_gini(const Acc& a) {
    if (a.n == 0) return 0.0;
    const double p = a.pos / a.n;
    return a.n * 2.0 * p * (1.0 - p);
  }
  double node_score(const std::vector<std::size_t>& rows) const {
    return -weighted_gini(accumulate(rows));
  }
  double split_score(const Acc& left, const Acc& total) const {
    const Acc right{total.n - left.n, total.pos - left.pos};
    return -(weighted_gini(left) + weighted_gini(right));
  }
};

// Squared-error criterion on residuals; score = sum^2 / n per side.
struct VarianceCriterion {
  std::span<const double> r;
  struct Acc {
    double n = 0, sum = 0;
  };
  Acc empty() const { return {}; }
  void add(Acc& a, std::size_t i) const {
    a.n += 1;
    a.sum += r[i];
  }
  Acc accumulate(const std::vector<std::size_t>& rows) const {
    Acc a;
    for (auto i : rows) add(a, i);
    return a;
  }
  static double score(const Acc& a) { return a.n == 0 ? 0.0 : a.sum * a.sum / a.n; }
  double node_score(const std::vector<std::size_t>& rows) const { return score(accumulate(rows)); }
  double split_score(const Acc& left, const Acc& total) const {
    return score(left) + score({total.n - left.n, total.sum - left.sum});
  }
};

template <typename Criterion, typename LeafFn, typename FeatureFn>
Tree grow_tree(const FeatureMatrix& X, std::vector<std::size_t> root_rows, std::size_t max_depth,
               std::size_t min_leaf, const Criterion& criterion, const LeafFn& leaf_value,
               const FeatureFn& pick_features) {
  Tree tree;
  struct Pending {
    std::size_t node;
    std::vector<std::size_t> rows;
    std::size_t depth;
  };
  tree.nodes.emplace_back();
  std::vector<Pending> stack;
  stack.push_back({0, std::move(root_rows), 0});
  while (!stack.empty()) {
    auto job = std::move(stack.back());
    stack.pop_back();
    SplitChoice split;
    if (job.depth < max_depth && job.rows.size() >= 2 * min_leaf) {
      split = best_split(X, job.rows, pick_features(), min_leaf, criterion);
    }
    if (split.feature < 0) {
      tree.nodes[job.node].value = leaf_value(job.rows);
      continue;
    }
    std::vector<std::size_t> left, right;
    for (auto i : job.rows) {
      (X[i][static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right).push_back(i);
    }
    const auto l = tree.nodes.size();
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& node = tree.nodes[job.node];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = static_cast<int>(l);
    node.right = static_cast<int>(l + 1);
    // Right pushed first so the left subtree is expanded first.
    stack.push_back({l + 1, std::move(right), job.depth + 1});
    stack.push_back({l, std::move(left), job.depth + 1});
  }
  return tree;
}

TreeEnsemble train_forest(const FeatureMatrix& X, std::span<const Label> y, const Hyperparams& hp,
                          std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t m = hp.max_features == 0
                            ? static_cast<std::size_t>(std::floor(std::sqrt(double(kFeatureDim))))
                            : std::min(hp.max_features, kFeatureDim);
  const GiniCriterion gini{y};
  TreeEnsemble forest;
  forest.trees.reserve(hp.n_trees);
  for (std::size_t t = 0; t < hp.n_trees; ++t) {
    std::vector<std::size_t> sample(X.size());
    for (auto& i : sample) i = rng.index(X.size());
    auto pick = [&] {
      std::vector<std::size_t> all(kFeatureDim);
      std::iota(all.begin(), all.end(), 0);
      for (std::size_t k = 0; k < m; ++k) std::swap(all[k], all[k + rng.index(kFeatureDim - k)]);
      all.resize(m);
      std::sort(all.begin(), all.end());
      return all;
    };
    auto vote = [&](const std::vector<std::size_t>& rows) {
      const auto a = gini.accumulate(rows);
      return a.pos * 2 >= a.n ? 1.0 : 0.0;
    };
    forest.trees.push_back(grow_tree(X, std::move(sample), hp.max_depth,
                                     std::max<std::size_t>(1, hp.min_samples_leaf), gini, vote,
                                     pick));
  }
  return forest;
}

TreeEnsemble train_boosting(const FeatureMatrix& X, std::span<const Label> y,
                            const Hyperparams& hp) {
  const std::size_t n = X.size();
  double pos = 0;
  for (auto l : y) pos += target(l);
  const double base_rate = pos / static_cast<double>(n);
  TreeEnsemble gbt;
  gbt.base_score = std::log(base_rate / (1.0 - base_rate));
  std::vector<double> F(n, gbt.base_score), residual(n), prob(n);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> every_feature(kFeatureDim);
  std::iota(every_feature.begin(), every_feature.end(), 0);
  for (std::size_t round = 0; round < hp.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      prob[i] = sigmoid(F[i]);
      residual[i] = target(y[i]) - prob[i];
    }
    const VarianceCriterion crit{residual};
    auto newton_leaf = [&](const std::vector<std::size_t>& rows) {
      double num = 0.0, den = 0.0;
      for (auto i : rows) {
        num += residual[i];
        den += prob[i] * (1.0 - prob[i]);
      }
      return hp.shrinkage * num / std::max(den, 1e-12);
    };
    auto tree = grow_tree(X, all, hp.max_depth, std::max<std::size_t>(1, hp.min_samples_leaf), crit,
                          newton_leaf, [&] { return every_feature; });
    for (std::size_t i = 0; i < n; ++i) F[i] += tree.evaluate(X[i]);
    gbt.trees.push_back(std::move(tree));
  }
  return gbt;
}

void check_training_data(const FeatureMatrix& X, std::span<const Label> y) {
  if (X.size() != y.size()) {
    throw PreconditionError("train: " + std::to_string(X.size()) + " rows vs " +
                            std::to_string(y.size()) + " labels");
  }
  if (X.size() < 2) {
    throw PreconditionError("train: need at least two rows");
  }
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (!is_valid_feature_vector(X[i])) {
      throw PreconditionError("train: row " + std::to_string(i) +
                              " violates the feature-vector invariants");
    }
  }
  const auto pos = std::count(y.begin(), y.end(), Label::Suicide);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(y.size())) {
    throw DegenerateData("train: labels contain a single class");
  }
}

}  // namespace

TrainedModel::TrainedModel(ModelKind kind, Hyperparams hp, std::uint64_t seed, Params params)
    : kind_(kind), hp_(hp), seed_(seed), params_(std::move(params)) {
  const bool linear =
      kind == ModelKind::LogisticRegression || kind == ModelKind::LinearSVM;
  if (linear != std::holds_alternative<LinearParams>(params_)) {
    throw PreconditionError("parameter payload does not match model kind");
  }
}

TrainedModel train(ModelKind kind, const FeatureMatrix& X, std::span<const Label> y,
                   const Hyperparams& hp, std::uint64_t seed) {
  check_training_data(X, y);
  switch (kind) {
    case ModelKind::LogisticRegression:
      return TrainedModel(kind, hp, seed, train_logistic(X, y, hp));
    case ModelKind::LinearSVM:
      return TrainedModel(kind, hp, seed, train_svm(X, y, hp));
    case ModelKind::RandomForest:
      return TrainedModel(kind, hp, seed, train_forest(X, y, hp, seed));
    case ModelKind::GradientBoostedTrees:
      return TrainedModel(kind, hp, seed, train_boosting(X, y, hp));
  }
  throw PreconditionError("unknown model kind");
}

Probability predict_proba(const TrainedModel& model, const FeatureVector& x) {
  if (const auto* lin = std::get_if<LinearParams>(&model.params())) {
    const auto z = lin->standardizer.apply(x);
    double s = lin->bias;
    for (std::size_t k = 0; k < kFeatureDim; ++k) s += lin->weights[k] * z[k];
    return Probability(sigmoid(s));
  }
  const auto& ens = std::get<TreeEnsemble>(model.params());
  if (model.kind() == ModelKind::RandomForest) {
    if (ens.trees.empty()) return Probability(0.5);
    double votes = 0.0;
    for (const auto& t : ens.trees) votes += t.evaluate(x);
    return Probability(std::clamp(votes / static_cast<double>(ens.trees.size()), 0.0, 1.0));
  }
  double f = ens.base_score;
  for (const auto& t : ens.trees) f += t.evaluate(x);
  return Probability(sigmoid(f));
}

Probability predict_proba(const TrainedModel& model, std::span<const double> x) {
  if (x.size() != kFeatureDim) {
    throw DimensionError("expected a 9-dimensional feature vector, got " +
                         std::to_string(x.size()));
  }
  FeatureVector v;
  std::copy(x.begin(), x.end(), v.values.begin());
  return predict_proba(model, v);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr std::string_view kModelMagic = "riskcascade.model";
constexpr int kModelFormat = 1;

json hp_to_json(const Hyperparams& hp) {
  return {{"learning_rate", hp.learning_rate}, {"l2", hp.l2},
          {"epochs", hp.epochs},               {"svm_lambda", hp.svm_lambda},
          {"n_trees", hp.n_trees},             {"max_depth", hp.max_depth},
          {"max_features", hp.max_features},   {"n_rounds", hp.n_rounds},
          {"shrinkage", hp.shrinkage},         {"min_samples_leaf", hp.min_samples_leaf}};
}

Hyperparams hp_from_json(const json& j) {
  Hyperparams hp;
  hp.learning_rate = j.at("learning_rate").get<double>();
  hp.l2 = j.at("l2").get<double>();
  hp.epochs = j.at("epochs").get<std::size_t>();
  hp.svm_lambda = j.at("svm_lambda").get<double>();
  hp.n_trees = j.at("n_trees").get<std::size_t>();
  hp.max_depth = j.at("max_depth").get<std::size_t>();
  hp.max_features = j.at("max_features").get<std::size_t>();
  hp.n_rounds = j.at("n_rounds").get<std::size_t>();
  hp.shrinkage = j.at("shrinkage").get<double>();
  hp.min_samples_leaf = j.at("min_samples_leaf").get<std::size_t>();
  return hp;
}

}  // namespace

std::string TrainedModel::serialize() const {
  json out;
  out["magic"] = kModelMagic;
  out["format_version"] = kModelFormat;
  out["kind"] = to_string(kind_);
  out["feature_dim"] = kFeatureDim;
  out["seed"] = seed_;
  out["hyperparameters"] = hp_to_json(hp_);
  if (const auto* lin = std::get_if<LinearParams>(&params_)) {
    out["params"] = {{"weights", lin->weights},
                     {"bias", lin->bias},
                     {"mean", lin->standardizer.mean},
                     {"scale", lin->standardizer.scale}};
  } else {
    const auto& ens = std::get<TreeEnsemble>(params_);
    json trees = json::array();
    for (const auto& t : ens.trees) {
      json nodes = json::array();
      for (const auto& n : t.nodes) {
        nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value}));
      }
      trees.push_back(std::move(nodes));
    }
    out["params"] = {{"base_score", ens.base_score}, {"trees", std::move(trees)}};
  }
  return out.dump() + "\n";
}

TrainedModel TrainedModel::deserialize(std::string_view text) try {
  auto in = json::parse(text, nullptr, false);
  if (in.is_discarded() || !in.is_object() || in.value("magic", "") != kModelMagic) {
    throw FormatError(1, "not a model file");
  }
  if (in.value("format_version", 0) != kModelFormat) {
    throw FormatError(1, "unsupported model format version");
  }
  if (in.value("feature_dim", std::size_t{0}) != kFeatureDim) {
    throw DimensionError("model was trained on a different feature dimension");
  }
  const auto kind = parse_model_kind(in.at("kind").get<std::string>());
  if (!kind) {
    throw FormatError(1, "unknown model kind");
  }
  const auto hp = hp_from_json(in.at("hyperparameters"));
  const auto seed = in.at("seed").get<std::uint64_t>();
  const auto& p = in.at("params");
  if (*kind == ModelKind::LogisticRegression || *kind == ModelKind::LinearSVM) {
    LinearParams lin;
    lin.weights = p.at("weights").get<std::array<double, kFeatureDim>>();
    lin.bias = p.at("bias").get<double>();
    lin.standardizer.mean = p.at("mean").get<std::array<double, kFeatureDim>>();
    lin.standardizer.scale = p.at("scale").get<std::array<double, kFeatureDim>>();
    return TrainedModel(*kind, hp, seed, lin);
  }
  TreeEnsemble ens;
  ens.base_score = p.at("base_score").get<double>();
  for (const auto& t : p.at("trees")) {
    Tree tree;
    for (const auto& n : t) {
      TreeNode node{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                    n.at(3).get<int>(), n.at(4).get<double>()};
      if (node.feature >= static_cast<int>(kFeatureDim)) {
        throw DimensionError("tree node references feature beyond dimension 9");
      }
      tree.nodes.push_back(node);
    }
    const auto count = static_cast<int>(tree.nodes.size());
    for (const auto& node : tree.nodes) {
      if (node.feature >= 0 && (node.left <= 0 || node.right <= 0 || node.left >= count ||
                                node.right >= count)) {
        throw FormatError(1, "tree node child index out of range");
      }
    }
    if (tree.nodes.empty()) {
      throw FormatError(1, "empty tree");
    }
    ens.trees.push_back(std::move(tree));
  }
  return TrainedModel(*kind, hp, seed, std::move(ens));
} catch (const json::exception& e) {
  throw FormatError(1, std::string("malformed model file: ") + e.what());
}

void TrainedModel::save(const std::filesystem::path& path) const {
  write_file_atomic(path, serialize());
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

// ---------------------------------------------------------------------------
// Cross-validation

std::vector<std::size_t> stratified_folds(std::span<const Label> y, std::size_t folds,
                                          std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> assignment(y.size());
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == Label::Suicide ? pos : neg).push_back(i);
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::size_t k = 0;
  for (auto* group : {&pos, &neg}) {
    for (auto i : *group) assignment[i] = k++ % folds;
  }
  return assignment;
}

CvResult cross_validate(ModelKind kind, const FeatureMatrix& X, std::span<const Label> y,
                        std::size_t folds, std::span<const Hyperparams> grid, std::uint64_t seed) {
  if (folds < 2) {
    throw PreconditionError("cross_validate: need at least two folds");
  }
  if (X.size() < folds) {
    throw PreconditionError("cross_validate: more folds than rows");
  }
  if (grid.empty()) {
    throw PreconditionError("cross_validate: empty grid");
  }
  check_training_data(X, y);
  const auto assignment = stratified_folds(y, folds, seed);
  CvResult result;
  result.mean_f1.reserve(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double total = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      FeatureMatrix Xtr, Xva;
      std::vector<Label> ytr, yva;
      for (std::size_t i = 0; i < X.size(); ++i) {
        if (assignment[i] == f) {
          Xva.push_back(X[i]);
          yva.push_back(y[i]);
        } else {
          Xtr.push_back(X[i]);
          ytr.push_back(y[i]);
        }
      }
      const auto model = train(kind, Xtr, ytr, grid[g], seed + f);
      std::vector<Label> preds;
      preds.reserve(Xva.size());
      for (const auto& row : Xva) preds.push_back(label_from_bool(predict_proba(model, row) >= 0.5));
      total += f1_score(preds, yva);
    }
    const double mean = total / static_cast<double>(folds);
    result.mean_f1.push_back(mean);
    if (g == 0 || mean > result.best_mean_f1) {
      result.best_mean_f1 = mean;
      result.best_index = g;
      result.best = grid[g];
    }
  }
  return result;
}

}  // namespace riskcascade
