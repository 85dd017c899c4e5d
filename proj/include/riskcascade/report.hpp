#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskcascade/cascade.hpp"
#include "riskcascade/eval.hpp"

namespace riskcascade {

struct StageCost {
  std::size_t accepted = 0;
  std::size_t escalated = 0;
  double stage1_fraction = 0.0;
  double stage2_fraction = 0.0;
  /// Share of escalations per reason; empty when nothing was escalated.
  std::map<EscalationReason, double> escalation_reasons;
};

/// Throws EmptyEvaluation on an empty decision list.
StageCost stage_cost_report(std::span<const RoutingDecision> decisions);

/// Routing decisions of the posts that reached routing (Stage-1 failures
/// have none).
std::vector<RoutingDecision> routing_decisions(std::span<const CascadeResult> results);

/// Labels in result order.
std::vector<Label> predicted_labels(std::span<const CascadeResult> results);

struct ReportRow {
  std::string dataset;
  std::string method;
  ConfusionCounts counts;
  MetricSet metrics;
  std::optional<GapReport> gaps;
  std::optional<StageCost> cost;
};

/// One jsonl record: {"dataset", "method", "metrics", "gaps"?, "cost"?}.
std::string report_json_line(const ReportRow& row);
void write_report(const std::filesystem::path& path, std::span<const ReportRow> rows);

/// Fixed-width table with percentages to two decimals.
std::string render_table(std::span<const ReportRow> rows);

/// {"id", "label", "provenance", "stage1_prob", "ensemble_prob"?, "verdicts"?, "reason"?}
std::string prediction_json_line(const CascadeResult& result);
void write_predictions(const std::filesystem::path& path, std::span<const CascadeResult> results);

struct WeightFile {
  EnsembleWeights weights;
  double val_f1 = 0.0;
};

/// {"roster", "weights", "cap", "val_f1"}; written atomically.
void save_weight_file(const std::filesystem::path& path, const WeightFile& file);
/// Throws IoError, ParseError or SchemaError.
WeightFile load_weight_file(const std::filesystem::path& path);

}  // namespace riskcascade
