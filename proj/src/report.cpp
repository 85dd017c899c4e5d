#include "riskcascade/report.hpp"

#include <cstdio>
#include <nlohmann/json.hpp>

#include "riskcascade/util.hpp"

namespace riskcascade {

using json = nlohmann::json;

StageCost stage_cost_report(std::span<const RoutingDecision> decisions) {
  if (decisions.empty()) {
    throw EmptyEvaluation("stage cost: no routing decisions");
  }
  StageCost c;
  std::map<EscalationReason, std::size_t> reasons;
  for (const auto& d : decisions) {
    if (d.accepted()) {
      ++c.accepted;
    } else {
      ++c.escalated;
      ++reasons[*d.reason()];
    }
  }
  const auto n = static_cast<double>(decisions.size());
  c.stage1_fraction = static_cast<double>(c.accepted) / n;
  c.stage2_fraction = static_cast<double>(c.escalated) / n;
  for (const auto& [reason, count] : reasons) {
    c.escalation_reasons[reason] = static_cast<double>(count) / static_cast<double>(c.escalated);
  }
  return c;
}

std::vector<RoutingDecision> routing_decisions(std::span<const CascadeResult> results) {
  std::vector<RoutingDecision> out;
  out.reserve(results.size());
  for (const auto& r : results) {
    if (r.routing) out.push_back(*r.routing);
  }
  return out;
}

std::vector<Label> predicted_labels(std::span<const CascadeResult> results) {
  std::vector<Label> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(r.label);
  return out;
}

namespace {

json metrics_json(const MetricSet& m) {
  return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

json cost_json(const StageCost& c) {
  json reasons = json::object();
  for (const auto& [reason, share] : c.escalation_reasons) {
    reasons[std::string(to_string(reason))] = share;
  }
  return {{"accepted", c.accepted},
          {"escalated", c.escalated},
          {"stage1_fraction", c.stage1_fraction},
          {"stage2_fraction", c.stage2_fraction},
          {"escalation_reasons", reasons}};
}

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string lpad(const std::string& s, std::size_t width) {
  return s.size() < width ? std::string(width - s.size(), ' ') + s : s;
}

}  // namespace

std::string report_json_line(const ReportRow& row) {
  json j = {{"dataset", row.dataset},
            {"method", row.method},
            {"metrics", metrics_json(row.metrics)},
            {"confusion",
             {{"tp", row.counts.tp}, {"fp", row.counts.fp}, {"fn", row.counts.fn}, {"tn", row.counts.tn}}}};
  if (row.gaps) {
    j["gaps"] = {{"delta_rec", row.gaps->delta_rec},
                 {"delta_f1", row.gaps->delta_f1},
                 {"avg_gap", row.gaps->avg_gap}};
  }
  if (row.cost) j["cost"] = cost_json(*row.cost);
  return j.dump();
}

void write_report(const std::filesystem::path& path, std::span<const ReportRow> rows) {
  std::string out;
  for (const auto& r : rows) out += report_json_line(r) + "\n";
  write_file_atomic(path, out);
}

std::string render_table(std::span<const ReportRow> rows) {
  std::size_t dw = 7, mw = 6;
  for (const auto& r : rows) {
    dw = std::max(dw, r.dataset.size());
    mw = std::max(mw, r.method.size());
  }
  std::string out = pad("dataset", dw) + "  " + pad("method", mw) +
                    "     Acc    Prec     Rec      F1  AvgGap  Stage1\n";
  for (const auto& r : rows) {
    out += pad(r.dataset, dw) + "  " + pad(r.method, mw);
    for (double v : {r.metrics.accuracy, r.metrics.precision, r.metrics.recall, r.metrics.f1}) {
      out += lpad(pct(v), 8);
    }
    out += r.gaps ? lpad(pct(r.gaps->avg_gap), 8) : lpad("-", 8);
    out += r.cost ? lpad(pct(r.cost->stage1_fraction), 8) : lpad("-", 8);
    out += "\n";
  }
  return out;
}

std::string prediction_json_line(const CascadeResult& r) {
  json j = {{"id", r.id},
            {"label", std::string(to_string(r.label))},
            {"provenance", std::string(to_string(r.provenance))}};
  j["stage1_prob"] = r.stage1_prob ? json(*r.stage1_prob) : json(nullptr);
  if (r.ensemble_prob) j["ensemble_prob"] = *r.ensemble_prob;
  if (!r.verdicts.empty()) {
    json v = json::array();
    for (const auto& verdict : r.verdicts) v.push_back(std::string(to_string(verdict.kind())));
    j["verdicts"] = v;
  }
  if (r.error) {
    j["reason"] = *r.error;
  } else if (r.routing && !r.routing->accepted()) {
    j["reason"] = std::string(to_string(*r.routing->reason()));
  }
  return j.dump();
}

void write_predictions(const std::filesystem::path& path, std::span<const CascadeResult> results) {
  std::string out;
  for (const auto& r : results) out += prediction_json_line(r) + "\n";
  write_file_atomic(path, out);
}

void save_weight_file(const std::filesystem::path& path, const WeightFile& file) {
  const json j = {{"roster", file.weights.roster()},
                  {"weights", file.weights.weights()},
                  {"cap", file.weights.cap()},
                  {"val_f1", file.val_f1}};
  write_file_atomic(path, j.dump(2) + "\n");
}

WeightFile load_weight_file(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError("weight file " + path.string() + ": " + e.what());
  }
  auto field = [&](const char* name) -> const json& {
    if (!j.is_object() || !j.contains(name)) {
      throw SchemaError(name, "missing from weight file " + path.string());
    }
    return j.at(name);
  };
  try {
    auto roster = field("roster").get<std::vector<std::string>>();
    auto weights = field("weights").get<std::vector<double>>();
    const double cap = field("cap").get<double>();
    const double val_f1 = field("val_f1").get<double>();
    return {EnsembleWeights(std::move(roster), std::move(weights), cap), val_f1};
  } catch (const json::type_error& e) {
    throw SchemaError("weights", e.what());
  }
}

}  // namespace riskcascade
