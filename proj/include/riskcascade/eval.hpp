#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskcascade/core.hpp"

namespace riskcascade {

/// Positive class is Suicide.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Fractions in [0, 1]. Zero-denominator conventions: precision is 0 when
/// nothing was predicted positive, recall is 0 when there are no positives,
/// and f1 is 0 when precision + recall is 0.
struct MetricSet {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Absolute recall/F1 differences between two domains, as fractions.
struct GapReport {
  double delta_rec = 0.0;
  double delta_f1 = 0.0;
  double avg_gap = 0.0;
};

/// Throws LengthMismatch on unequal lengths and EmptyEvaluation on empty input.
ConfusionCounts confusion(std::span<const Label> preds, std::span<const Label> gold);

/// Throws EmptyEvaluation when the counts are all zero.
MetricSet metrics(const ConfusionCounts& c);

/// F1 of predictions against gold; shorthand for metrics(confusion(...)).f1.
double f1_score(std::span<const Label> preds, std::span<const Label> gold);

GapReport cross_domain_gap(const MetricSet& reference, const MetricSet& shifted) noexcept;

}  // namespace riskcascade
