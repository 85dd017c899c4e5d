#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "riskcascade/analysis.hpp"
#include "riskcascade/cascade.hpp"
#include "riskcascade/errors.hpp"
#include "riskcascade/eval.hpp"
#include "riskcascade/mlmodels.hpp"
#include "riskcascade/pipeline.hpp"

namespace py = pybind11;
namespace rc = riskcascade;

namespace {

rc::Label label_arg(const std::string& s) {
  const auto l = rc::parse_label(s);
  if (!l) throw rc::PreconditionError("unknown label '" + s + "'");
  return *l;
}

std::vector<rc::Label> labels_arg(const std::vector<std::string>& v) {
  std::vector<rc::Label> out;
  for (const auto& s : v) out.push_back(label_arg(s));
  return out;
}

rc::Verdict verdict_arg(const std::string& s) {
  if (s == "abstain") return rc::Verdict::abstain("");
  return rc::Verdict::of(label_arg(s));
}

rc::FeatureVector features_arg(const std::vector<double>& v) {
  if (v.size() != rc::kFeatureDim) {
    throw rc::DimensionError("expected " + std::to_string(rc::kFeatureDim) + " features");
  }
  rc::FeatureVector out;
  std::copy(v.begin(), v.end(), out.values.begin());
  return out;
}

rc::ModelKind kind_arg(const std::string& s) {
  const auto k = rc::parse_model_kind(s);
  if (!k) throw rc::PreconditionError("unknown model kind '" + s + "'");
  return *k;
}

py::dict metrics_dict(const rc::MetricSet& m) {
  py::dict d;
  d["accuracy"] = m.accuracy;
  d["precision"] = m.precision;
  d["recall"] = m.recall;
  d["f1"] = m.f1;
  return d;
}

rc::MetricSet metrics_arg(const py::dict& d) {
  rc::MetricSet m;
  m.recall = d["recall"].cast<double>();
  m.f1 = d["f1"].cast<double>();
  return m;
}

using Command = int (*)(const rc::PipelineConfig&, std::ostream&, std::ostream&);

py::tuple run_command(Command cmd, const std::filesystem::path& config_path) {
  const auto config = rc::load_config(config_path);
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = cmd(config, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-stage cascade for suicide-risk text classification";
  py::register_exception<rc::Error>(m, "Error", PyExc_ValueError);

  m.def("token_length", [](const std::string& text) { return rc::token_length(text); });

  m.def(
      "route",
      [](std::size_t tokens, double prob, double tau_low, double tau_high, std::size_t max_tokens) {
        const rc::RoutingConfig cfg{tau_low, tau_high, max_tokens};
        cfg.validate();
        const auto d = rc::route(tokens, rc::Probability(prob), cfg);
        py::dict out;
        out["accepted"] = d.accepted();
        if (d.accepted()) out["label"] = std::string(rc::to_string(*d.label()));
        else out["reason"] = std::string(rc::to_string(*d.reason()));
        return out;
      },
      py::arg("tokens"), py::arg("prob"), py::arg("tau_low") = 0.005, py::arg("tau_high") = 0.995,
      py::arg("max_tokens") = 256);

  m.def(
      "features",
      [](const std::string& raw) {
        const auto v = rc::vectorize(rc::parse_analysis(raw));
        return std::vector<double>(v.values.begin(), v.values.end());
      },
      py::arg("analyst_reply"), "Parse an analyst reply and return its 9-dim feature vector.");
  m.def("feature_names", [] {
    std::vector<std::string> names;
    for (auto n : rc::feature_names()) names.emplace_back(n);
    return names;
  });

  m.def(
      "llm_vote",
      [](const std::vector<std::string>& verdicts, const std::string& tie_breaker) {
        std::vector<rc::Verdict> v;
        for (const auto& s : verdicts) v.push_back(verdict_arg(s));
        return std::string(rc::to_string(rc::llm_vote(v, label_arg(tie_breaker))));
      },
      py::arg("verdicts"), py::arg("tie_breaker"));

  m.def(
      "ml_vote",
      [](const std::vector<double>& scores, const std::vector<double>& weights, double threshold) {
        const auto r = rc::ml_vote(scores, weights, threshold);
        return py::make_tuple(std::string(rc::to_string(r.label)), r.ensemble_prob.value());
      },
      py::arg("scores"), py::arg("weights"), py::arg("threshold") = 0.5);

  m.def(
      "project_to_capped_simplex",
      [](const std::vector<double>& v, double cap) { return rc::project_to_capped_simplex(v, cap); },
      py::arg("v"), py::arg("cap"));
  m.def(
      "is_feasible",
      [](const std::vector<double>& w, double cap, double tol) { return rc::is_feasible(w, cap, tol); },
      py::arg("weights"), py::arg("cap"), py::arg("sum_tolerance") = 1e-6);

  m.def(
      "optimize_weights",
      [](const std::vector<std::vector<double>>& scores, const std::vector<std::string>& labels,
         double cap, std::uint64_t seed, std::size_t restarts) {
        rc::OptimizerOptions opt;
        opt.restarts = restarts;
        const auto y = labels_arg(labels);
        rc::OptimizedWeights r;
        {
          py::gil_scoped_release release;
          r = rc::optimize_weights(scores, y, cap, seed, opt);
        }
        py::dict out;
        out["weights"] = r.weights;
        out["f1"] = r.f1;
        out["uniform_f1"] = r.uniform_f1;
        return out;
      },
      py::arg("scores"), py::arg("labels"), py::arg("cap") = 0.5, py::arg("seed") = 0,
      py::arg("restarts") = 16);

  m.def(
      "metrics",
      [](const std::vector<std::string>& preds, const std::vector<std::string>& gold) {
        return metrics_dict(rc::metrics(rc::confusion(labels_arg(preds), labels_arg(gold))));
      },
      py::arg("preds"), py::arg("gold"));
  m.def(
      "cross_domain_gap",
      [](const py::dict& reference, const py::dict& shifted) {
        const auto g = rc::cross_domain_gap(metrics_arg(reference), metrics_arg(shifted));
        py::dict out;
        out["delta_rec"] = g.delta_rec;
        out["delta_f1"] = g.delta_f1;
        out["avg_gap"] = g.avg_gap;
        return out;
      },
      py::arg("reference"), py::arg("shifted"));

  m.def(
      "train_model",
      [](const std::string& kind, const std::vector<std::vector<double>>& X,
         const std::vector<std::string>& y, std::uint64_t seed) {
        rc::FeatureMatrix fx;
        for (const auto& row : X) fx.push_back(features_arg(row));
        const auto k = kind_arg(kind);
        const auto labels = labels_arg(y);
        py::gil_scoped_release release;
        return rc::train(k, fx, labels, rc::default_hyperparams(k), seed).serialize();
      },
      py::arg("kind"), py::arg("X"), py::arg("y"), py::arg("seed") = 0,
      "Train with default hyperparameters; returns the serialized model.");
  m.def(
      "predict_proba",
      [](const std::string& model, const std::vector<double>& x) {
        return rc::predict_proba(rc::TrainedModel::deserialize(model), features_arg(x)).value();
      },
      py::arg("model"), py::arg("x"));

  m.def("extract", [](const std::filesystem::path& p) { return run_command(&rc::cmd_extract, p); },
        py::arg("config"));
  m.def("train", [](const std::filesystem::path& p) { return run_command(&rc::cmd_train, p); },
        py::arg("config"));
  m.def("route_datasets", [](const std::filesystem::path& p) { return run_command(&rc::cmd_route, p); },
        py::arg("config"));
  m.def("evaluate", [](const std::filesystem::path& p) { return run_command(&rc::cmd_evaluate, p); },
        py::arg("config"));
  m.def("sweep_thresholds",
        [](const std::filesystem::path& p) { return run_command(&rc::cmd_sweep_thresholds, p); },
        py::arg("config"));
}
