#include "riskcascade/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "riskcascade/eval.hpp"
#include "riskcascade/util.hpp"

namespace riskcascade {

void RoutingConfig::validate() const {
  if (!(0.0 <= tau_low && tau_low < tau_high && tau_high <= 1.0)) {
    throw PreconditionError("routing thresholds must satisfy 0 <= tau_low < tau_high <= 1");
  }
  if (max_tokens == 0) {
    throw PreconditionError("routing max_tokens must be positive");
  }
}

std::string_view to_string(EscalationReason reason) noexcept {
  switch (reason) {
    case EscalationReason::AmbiguousProb: return "ambiguous_prob";
    case EscalationReason::TooLong: return "too_long";
    case EscalationReason::Both: return "both";
  }
  return "both";
}

RoutingDecision route(std::size_t token_count, Probability p, const RoutingConfig& cfg) {
  const bool short_enough = token_count <= cfg.max_tokens;
  const bool confident_pos = p.value() >= cfg.tau_high;
  const bool confident_neg = p.value() <= cfg.tau_low;
  const bool confident = confident_pos || confident_neg;
  if (short_enough && confident) {
    return RoutingDecision::accept(label_from_bool(confident_pos), p);
  }
  if (short_enough) {
    return RoutingDecision::escalate(EscalationReason::AmbiguousProb, p);
  }
  return RoutingDecision::escalate(confident ? EscalationReason::TooLong : EscalationReason::Both,
                                   p);
}

RoutingDecision route(const Post& post, Probability p, const RoutingConfig& cfg) {
  return route(token_length(post.text), p, cfg);
}

Label llm_vote(std::span<const Verdict> verdicts, Label tie_breaker) {
  if (verdicts.empty()) {
    throw PreconditionError("llm_vote needs at least one verdict");
  }
  std::size_t pos = 0, neg = 0;
  for (const auto& v : verdicts) {
    if (v.kind() == Verdict::Kind::Suicide) ++pos;
    else if (v.kind() == Verdict::Kind::NonSuicide) ++neg;
  }
  if (pos == neg) return tie_breaker;
  return label_from_bool(pos > neg);
}

// ---------------------------------------------------------------------------
// Weights

bool is_feasible(std::span<const double> weights, double cap, double sum_tolerance) noexcept {
  if (weights.empty()) return false;
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) return false;
    sum += w;
  }
  return std::abs(sum - 1.0) <= sum_tolerance && weights[0] <= cap + 1e-9;
}

EnsembleWeights::EnsembleWeights(std::vector<std::string> roster, std::vector<double> weights,
                                 double cap)
    : roster_(std::move(roster)), weights_(std::move(weights)), cap_(cap) {
  if (!roster_.empty() && roster_.size() != weights_.size()) {
    throw DimensionError("roster has " + std::to_string(roster_.size()) + " names for " +
                         std::to_string(weights_.size()) + " weights");
  }
  if (!(cap_ > 0.0 && cap_ <= 1.0)) {
    throw PreconditionError("weight cap must lie in (0, 1]");
  }
  if (!is_feasible(weights_, cap_)) {
    throw PreconditionError("ensemble weights are not on the capped simplex");
  }
}

std::vector<double> project_to_capped_simplex(std::span<const double> v, double cap) {
  const std::size_t m = v.size();
  if (m == 0) {
    throw PreconditionError("cannot project an empty weight vector");
  }
  if (!(cap > 0.0 && cap <= 1.0) || cap + static_cast<double>(m - 1) < 1.0) {
    throw PreconditionError("capped simplex is empty for this cap and roster size");
  }
  auto upper = [&](std::size_t i) { return i == 0 ? cap : 1.0; };
  auto mass = [&](double tau) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += std::clamp(v[i] - tau, 0.0, upper(i));
    return s;
  };
  // mass() is non-increasing in tau; bracket the root of mass(tau) = 1.
  double lo = *std::min_element(v.begin(), v.end()) - 1.0;
  double hi = *std::max_element(v.begin(), v.end());
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (mass(mid) >= 1.0 ? lo : hi) = mid;
  }
  std::vector<double> w(m);
  for (std::size_t i = 0; i < m; ++i) w[i] = std::clamp(v[i] - lo, 0.0, upper(i));
  // Push the remaining rounding error onto coordinates with room to move.
  double residual = 1.0 - std::accumulate(w.begin(), w.end(), 0.0);
  for (std::size_t i = 0; i < m && residual != 0.0; ++i) {
    const double room = residual > 0 ? upper(i) - w[i] : w[i];
    const double step = std::copysign(std::min(std::abs(residual), room), residual);
    w[i] += step;
    residual -= step;
  }
  return w;
}

MlVote ml_vote(std::span<const double> scores, std::span<const double> weights, double threshold) {
  if (scores.size() != weights.size()) {
    throw DimensionError("score vector has " + std::to_string(scores.size()) +
                         " entries for a roster of " + std::to_string(weights.size()));
  }
  double p = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) p += weights[i] * scores[i];
  p = std::clamp(p, 0.0, 1.0);
  return {label_from_bool(p >= threshold), Probability(p)};
}

MlVote ml_vote(std::span<const double> scores, const EnsembleWeights& weights, double threshold) {
  return ml_vote(scores, std::span<const double>(weights.weights()), threshold);
}

double ensemble_f1(std::span<const ScoreVector> scores, std::span<const Label> labels,
                   std::span<const double> weights, double threshold) {
  std::vector<Label> preds;
  preds.reserve(scores.size());
  for (const auto& s : scores) preds.push_back(ml_vote(s, weights, threshold).label);
  return f1_score(preds, labels);
}

namespace {

// Pairwise-transfer pattern search from `start`: move up to `step` of mass
// from slot a to slot b whenever that strictly raises F1; halve the step once
// no transfer helps.
std::pair<std::vector<double>, double> pattern_search(std::span<const ScoreVector> scores,
                                                      std::span<const Label> labels,
                                                      std::vector<double> w, double cap,
                                                      const OptimizerOptions& opt) {
  const std::size_t m = w.size();
  double best = ensemble_f1(scores, labels, w, opt.threshold);
  std::vector<double> cand(m);
  for (double step = opt.initial_step; step >= opt.min_step; step *= 0.5) {
    bool improved = true;
    while (improved && best < 1.0) {
      improved = false;
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
          if (a == b) continue;
          double delta = std::min(step, w[a]);
          if (b == 0) delta = std::min(delta, cap - w[0]);
          if (delta <= 0.0) continue;
          cand = w;
          cand[a] -= delta;
          cand[b] += delta;
          cand = project_to_capped_simplex(cand, cap);
          const double f = ensemble_f1(scores, labels, cand, opt.threshold);
          if (f > best) {
            best = f;
            w = cand;
            improved = true;
          }
        }
      }
    }
  }
  return {std::move(w), best};
}

}  // namespace

OptimizedWeights optimize_weights(std::span<const ScoreVector> val_scores,
                                  std::span<const Label> val_labels, double cap,
                                  std::uint64_t seed, const OptimizerOptions& options) {
  if (!(cap > 0.0 && cap <= 1.0)) {
    throw PreconditionError("weight cap must lie in (0, 1]");
  }
  if (val_scores.size() != val_labels.size()) {
    throw LengthMismatch("validation scores and labels differ in length");
  }
  const auto pos = std::count(val_labels.begin(), val_labels.end(), Label::Suicide);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(val_labels.size())) {
    throw DegenerateData("weight optimisation needs both labels in the validation set");
  }
  const std::size_t m = val_scores.front().size();
  if (m == 0) {
    throw DimensionError("empty score vectors");
  }
  for (const auto& s : val_scores) {
    if (s.size() != m) throw DimensionError("ragged validation score vectors");
  }

  const std::vector<double> uniform =
      project_to_capped_simplex(std::vector<double>(m, 1.0 / static_cast<double>(m)), cap);
  OptimizedWeights out;
  out.uniform_f1 = ensemble_f1(val_scores, val_labels, uniform, options.threshold);

  auto [w, f] = pattern_search(val_scores, val_labels, uniform, cap, options);
  out.weights = std::move(w);
  out.f1 = f;

  Rng rng(seed);
  for (std::size_t r = 0; r < options.restarts && out.f1 < 1.0; ++r) {
    std::vector<double> start(m);
    for (auto& x : start) x = -std::log(1.0 - rng.uniform());  // Dirichlet(1) via exponentials
    const double total = std::accumulate(start.begin(), start.end(), 0.0);
    for (auto& x : start) x /= total;
    auto [rw, rf] =
        pattern_search(val_scores, val_labels, project_to_capped_simplex(start, cap), cap, options);
    if (rf > out.f1) {
      out.weights = std::move(rw);
      out.f1 = rf;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Batch cascade

FeatureVector MatrixFeatureProvider::features(std::size_t index, const Post& post) {
  ++lookups_;
  if (index >= matrix_.size()) {
    throw DimensionError("feature matrix has no row for post '" + post.id + "'");
  }
  return matrix_[index];
}

FeatureVector AnalystFeatureProvider::features(std::size_t, const Post& post) {
  return vectorize(analyze_post(post, analyst_, cache_, max_attempts_));
}

std::string_view to_string(Provenance provenance) noexcept {
  switch (provenance) {
    case Provenance::Stage1: return "stage1";
    case Provenance::Stage2: return "stage2";
    case Provenance::Fallback: return "fallback";
  }
  return "fallback";
}

namespace {

void resolve_with_agents(const AgentVotingPathway& path, const Post& post, CascadeResult& r) {
  const Label tie = label_from_bool(*r.stage1_prob >= 0.5);
  for (auto persona : path.agents) {
    r.verdicts.push_back(agent_classify(*path.client, persona, post.text));
  }
  r.label = llm_vote(r.verdicts, tie);
  const bool all_abstained = std::all_of(r.verdicts.begin(), r.verdicts.end(),
                                         [](const Verdict& v) { return v.is_abstain(); });
  if (all_abstained) {
    r.provenance = Provenance::Fallback;
    r.error = "every agent abstained: " + r.verdicts.front().reason();
  } else {
    r.provenance = Provenance::Stage2;
  }
}

void resolve_with_models(const MlVotingPathway& path, std::size_t index, const Post& post,
                         CascadeResult& r) {
  const auto x = path.features->features(index, post);
  ScoreVector scores;
  scores.reserve(path.models.size() + 1);
  scores.push_back(*r.stage1_prob);
  for (const auto& m : path.models) scores.push_back(predict_proba(m, x));
  const auto vote = ml_vote(scores, path.weights, path.threshold);
  r.label = vote.label;
  r.ensemble_prob = vote.ensemble_prob.value();
  r.provenance = Provenance::Stage2;
}

}  // namespace

std::vector<CascadeResult> run_cascade(const Dataset& ds, const Scorer& stage1,
                                       const RoutingConfig& cfg, const Stage2Pathway& stage2,
                                       const CascadeOptions& options) {
  cfg.validate();
  if (const auto* agents = std::get_if<AgentVotingPathway>(&stage2)) {
    if (agents->agents.empty() || agents->client == nullptr) {
      throw PreconditionError("agent voting needs at least one agent and a chat client");
    }
  } else {
    const auto& ml = std::get<MlVotingPathway>(stage2);
    if (ml.features == nullptr) {
      throw PreconditionError("ML voting needs a feature provider");
    }
    if (ml.weights.size() != ml.models.size() + 1) {
      throw DimensionError("ensemble weights do not match Stage 1 plus " +
                           std::to_string(ml.models.size()) + " models");
    }
  }

  std::vector<CascadeResult> results(ds.size());
  parallel_for(ds.size(), std::max<std::size_t>(1, options.parallelism), [&](std::size_t i) {
    const auto& post = ds[i];
    auto& r = results[i];
    r.id = post.id;
    try {
      r.stage1_prob = stage1.score(post.text).value();
    } catch (const std::exception& e) {
      r.label = Label::Suicide;
      r.provenance = Provenance::Fallback;
      r.error = std::string("stage 1 failed: ") + e.what();
      return;
    }
    r.routing = route(post, Probability(*r.stage1_prob), cfg);
    if (r.routing->accepted()) {
      r.label = *r.routing->label();
      r.provenance = Provenance::Stage1;
      return;
    }
    try {
      if (const auto* agents = std::get_if<AgentVotingPathway>(&stage2)) {
        resolve_with_agents(*agents, post, r);
      } else {
        resolve_with_models(std::get<MlVotingPathway>(stage2), i, post, r);
      }
    } catch (const std::exception& e) {
      r.label = label_from_bool(*r.stage1_prob >= 0.5);
      r.provenance = Provenance::Fallback;
      r.ensemble_prob.reset();
      r.error = std::string("stage 2 failed: ") + e.what();
    }
  });
  return results;
}

// ---------------------------------------------------------------------------
// Threshold sweep

SweepResult sweep_thresholds(std::span<const double> stage1_probs,
                             std::span<const std::size_t> token_counts,
                             std::span<const Label> stage2_labels, std::span<const Label> gold,
                             std::span<const std::pair<double, double>> grid,
                             std::size_t max_tokens, double min_coverage) {
  const std::size_t n = stage1_probs.size();
  if (token_counts.size() != n || stage2_labels.size() != n || gold.size() != n) {
    throw LengthMismatch("sweep_thresholds: inputs differ in length");
  }
  if (n == 0) {
    throw EmptyEvaluation("sweep_thresholds: no validation posts");
  }
  SweepResult out;
  std::vector<Label> preds(n);
  for (const auto& [lo, hi] : grid) {
    RoutingConfig cfg{lo, hi, max_tokens};
    cfg.validate();
    std::size_t accepted = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto d = route(token_counts[i], Probability(stage1_probs[i]), cfg);
      if (d.accepted()) {
        ++accepted;
        preds[i] = *d.label();
      } else {
        preds[i] = stage2_labels[i];
      }
    }
    ThresholdPoint pt{lo, hi, f1_score(preds, gold),
                      static_cast<double>(accepted) / static_cast<double>(n)};
    out.points.push_back(pt);
    if (pt.coverage >= min_coverage && (!out.best || pt.f1 > out.best->f1)) {
      out.best = pt;
    }
  }
  return out;
}

std::vector<std::pair<double, double>> default_threshold_grid() {
  std::vector<std::pair<double, double>> grid;
  for (double t : {0.001, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4}) {
    grid.emplace_back(t, 1.0 - t);
  }
  return grid;
}

}  // namespace riskcascade
