#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "riskcascade/analysis.hpp"
#include "riskcascade/core.hpp"
#include "riskcascade/mlmodels.hpp"
#include "riskcascade/scorers.hpp"

namespace riskcascade {

// ---------------------------------------------------------------------------
// Stage-1 routing

/// Confidence band [tau_low, tau_high] plus a token-length cap.
struct RoutingConfig {
  double tau_low = 0.005;
  double tau_high = 0.995;
  std::size_t max_tokens = 256;

  /// Throws PreconditionError unless 0 <= tau_low < tau_high <= 1 and max_tokens > 0.
  void validate() const;
};

enum class EscalationReason : std::uint8_t { AmbiguousProb, TooLong, Both };

std::string_view to_string(EscalationReason reason) noexcept;

class RoutingDecision {
public:
  static RoutingDecision accept(Label label, Probability prob) {
    return RoutingDecision(true, label, EscalationReason::AmbiguousProb, prob);
  }
  static RoutingDecision escalate(EscalationReason reason, Probability prob) {
    return RoutingDecision(false, Label::NonSuicide, reason, prob);
  }

  bool accepted() const noexcept { return accepted_; }
  /// Set only for accepted posts.
  std::optional<Label> label() const noexcept {
    return accepted_ ? std::optional<Label>(label_) : std::nullopt;
  }
  /// Set only for escalated posts.
  std::optional<EscalationReason> reason() const noexcept {
    return accepted_ ? std::nullopt : std::optional<EscalationReason>(reason_);
  }
  Probability prob() const noexcept { return prob_; }

  bool operator==(const RoutingDecision& o) const noexcept {
    return accepted_ == o.accepted_ && label() == o.label() && reason() == o.reason() &&
           prob_.value() == o.prob_.value();
  }

private:
  RoutingDecision(bool accepted, Label label, EscalationReason reason, Probability prob)
      : accepted_(accepted), label_(label), reason_(reason), prob_(prob) {}
  bool accepted_;
  Label label_;
  EscalationReason reason_;
  Probability prob_;
};

/// Short (token_length <= max_tokens) posts with p >= tau_high or p <= tau_low
/// are accepted; everything else is escalated with the reason that applies.
RoutingDecision route(std::size_t token_count, Probability stage1_prob, const RoutingConfig& cfg);
RoutingDecision route(const Post& post, Probability stage1_prob, const RoutingConfig& cfg);

// ---------------------------------------------------------------------------
// Stage-2 voting

/// Equal-weight vote over non-abstaining verdicts; a tie (including no
/// votes at all) goes to `tie_breaker`. Throws PreconditionError when empty.
Label llm_vote(std::span<const Verdict> verdicts, Label tie_breaker);

/// Per-model probabilities, aligned with an ensemble roster.
using ScoreVector = std::vector<double>;

/// Convex weights over a roster whose first slot is the Stage-1 scorer.
class EnsembleWeights {
public:
  /// Validates feasibility with a sum tolerance of 1e-6.
  EnsembleWeights(std::vector<std::string> roster, std::vector<double> weights, double cap);

  const std::vector<std::string>& roster() const noexcept { return roster_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double cap() const noexcept { return cap_; }
  std::size_t size() const noexcept { return weights_.size(); }

private:
  std::vector<std::string> roster_;
  std::vector<double> weights_;
  double cap_;
};

/// Non-negative, |sum - 1| <= sum_tolerance, weights[0] <= cap + 1e-9.
bool is_feasible(std::span<const double> weights, double cap, double sum_tolerance = 1e-6) noexcept;

/// Euclidean projection onto {w >= 0, sum w = 1, w[0] <= cap}.
std::vector<double> project_to_capped_simplex(std::span<const double> v, double cap);

struct MlVote {
  Label label;
  Probability ensemble_prob;
};

/// ensemble_prob = sum_i w_i p_i; Suicide iff ensemble_prob >= threshold.
/// Throws DimensionError when the score vector does not match the roster.
MlVote ml_vote(std::span<const double> scores, std::span<const double> weights,
               double threshold = 0.5);
MlVote ml_vote(std::span<const double> scores, const EnsembleWeights& weights,
               double threshold = 0.5);

struct OptimizerOptions {
  /// Random restarts in addition to the uniform start.
  std::size_t restarts = 16;
  double initial_step = 0.25;
  double min_step = 1e-3;
  double threshold = 0.5;
};

struct OptimizedWeights {
  std::vector<double> weights;
  double f1 = 0.0;
  double uniform_f1 = 0.0;
};

/// Maximises validation F1 of ml_vote over the capped simplex by
/// multi-start pairwise-transfer pattern search. The uniform start is always
/// evaluated first, so the result never scores below it.
/// Throws DegenerateData unless both labels occur, DimensionError on ragged
/// score rows, and PreconditionError for cap outside (0, 1].
OptimizedWeights optimize_weights(std::span<const ScoreVector> val_scores,
                                  std::span<const Label> val_labels, double cap,
                                  std::uint64_t seed, const OptimizerOptions& options = {});

/// Validation F1 of ml_vote under `weights`.
double ensemble_f1(std::span<const ScoreVector> scores, std::span<const Label> labels,
                   std::span<const double> weights, double threshold = 0.5);

// ---------------------------------------------------------------------------
// Batch cascade

/// Supplies feature vectors for escalated posts.
class FeatureProvider {
public:
  virtual ~FeatureProvider() = default;
  /// `index` is the post's position in the dataset being classified.
  virtual FeatureVector features(std::size_t index, const Post& post) = 0;
};

/// Precomputed, dataset-aligned matrix.
class MatrixFeatureProvider final : public FeatureProvider {
public:
  explicit MatrixFeatureProvider(const FeatureMatrix& matrix) : matrix_(matrix) {}
  FeatureVector features(std::size_t index, const Post& post) override;
  std::size_t lookups() const noexcept { return lookups_.load(); }

private:
  const FeatureMatrix& matrix_;
  std::atomic<std::size_t> lookups_{0};
};

/// Extracts on demand through the analyst, cache first.
class AnalystFeatureProvider final : public FeatureProvider {
public:
  AnalystFeatureProvider(ChatClient& analyst, FeatureCache& cache, std::size_t max_attempts = 3)
      : analyst_(analyst), cache_(cache), max_attempts_(max_attempts) {}
  FeatureVector features(std::size_t index, const Post& post) override;

private:
  ChatClient& analyst_;
  FeatureCache& cache_;
  std::size_t max_attempts_;
};

struct AgentVotingPathway {
  std::vector<AgentPersona> agents;
  ChatClient* client = nullptr;
};

struct MlVotingPathway {
  std::vector<TrainedModel> models;  // roster slots 1..n
  EnsembleWeights weights;           // roster slot 0 is Stage 1
  FeatureProvider* features = nullptr;
  double threshold = 0.5;
};

using Stage2Pathway = std::variant<AgentVotingPathway, MlVotingPathway>;

/// Stage1: accepted by routing. Stage2: resolved by the selected pathway.
/// Fallback: a remote call failed; the Stage-1 label (or Suicide when Stage 1
/// itself failed) is reported and the error recorded.
enum class Provenance : std::uint8_t { Stage1, Stage2, Fallback };

std::string_view to_string(Provenance provenance) noexcept;

struct CascadeResult {
  std::string id;
  Label label = Label::NonSuicide;
  Provenance provenance = Provenance::Stage1;
  std::optional<double> stage1_prob;
  std::optional<RoutingDecision> routing;
  std::optional<double> ensemble_prob;
  std::vector<Verdict> verdicts;
  std::optional<std::string> error;
};

struct CascadeOptions {
  std::size_t parallelism = 1;
};

/// Routes every post, resolving escalations through `stage2`. Results keep
/// dataset order; per-post remote failures become Fallback entries.
std::vector<CascadeResult> run_cascade(const Dataset& ds, const Scorer& stage1,
                                       const RoutingConfig& cfg, const Stage2Pathway& stage2,
                                       const CascadeOptions& options = {});

// ---------------------------------------------------------------------------
// Threshold selection

struct ThresholdPoint {
  double tau_low = 0.0;
  double tau_high = 1.0;
  double f1 = 0.0;
  double coverage = 0.0;  // fraction accepted at Stage 1
};

struct SweepResult {
  std::vector<ThresholdPoint> points;
  /// Best feasible point; empty when no point reaches min_coverage.
  std::optional<ThresholdPoint> best;
};

/// Grid search over (tau_low, tau_high) pairs. For each pair, accepted posts
/// take the Stage-1 label and escalated posts the precomputed Stage-2 label;
/// the pair with the highest F1 among those with coverage >= min_coverage
/// wins, ties going to the earlier grid point.
SweepResult sweep_thresholds(std::span<const double> stage1_probs,
                             std::span<const std::size_t> token_counts,
                             std::span<const Label> stage2_labels, std::span<const Label> gold,
                             std::span<const std::pair<double, double>> grid,
                             std::size_t max_tokens, double min_coverage);

/// Symmetric grid tau_low = t, tau_high = 1 - t for the usual t values.
std::vector<std::pair<double, double>> default_threshold_grid();

}  // namespace riskcascade
