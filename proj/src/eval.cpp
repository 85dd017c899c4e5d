#include "riskcascade/eval.hpp"

#include <cmath>

namespace riskcascade {

ConfusionCounts confusion(std::span<const Label> preds, std::span<const Label> gold) {
  if (preds.size() != gold.size()) {
    throw LengthMismatch("confusion: " + std::to_string(preds.size()) + " predictions vs " +
                         std::to_string(gold.size()) + " gold labels");
  }
  if (preds.empty()) {
    throw EmptyEvaluation("confusion: nothing to evaluate");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] == Label::Suicide;
    const bool g = gold[i] == Label::Suicide;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

MetricSet metrics(const ConfusionCounts& c) {
  if (c.total() == 0) {
    throw EmptyEvaluation("metrics: empty confusion counts");
  }
  const auto d = [](std::size_t x) { return static_cast<double>(x); };
  MetricSet m;
  m.accuracy = d(c.tp + c.tn) / d(c.total());
  m.precision = c.tp + c.fp == 0 ? 0.0 : d(c.tp) / d(c.tp + c.fp);
  m.recall = c.tp + c.fn == 0 ? 0.0 : d(c.tp) / d(c.tp + c.fn);
  const double denom = m.precision + m.recall;
  m.f1 = denom == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / denom;
  return m;
}

double f1_score(std::span<const Label> preds, std::span<const Label> gold) {
  return metrics(confusion(preds, gold)).f1;
}

GapReport cross_domain_gap(const MetricSet& reference, const MetricSet& shifted) noexcept {
  GapReport g;
  g.delta_rec = std::abs(reference.recall - shifted.recall);
  g.delta_f1 = std::abs(reference.f1 - shifted.f1);
  g.avg_gap = 0.5 * (g.delta_rec + g.delta_f1);
  return g;
}

}  // namespace riskcascade
