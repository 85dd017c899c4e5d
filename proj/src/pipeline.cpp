#include "riskcascade/pipeline.hpp"

#include <algorithm>
#include <memory>
#include <ostream>
#include <set>
#include <nlohmann/json.hpp>

#include "riskcascade/eval.hpp"
#include "riskcascade/mocks.hpp"
#include "riskcascade/report.hpp"
#include "riskcascade/util.hpp"

namespace riskcascade {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view to_string(PathwayKind kind) noexcept {
  return kind == PathwayKind::Llm ? "llm" : "ml";
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

/// Typed access to one JSON object; keys never asked for are rejected.
class ObjectReader {
public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw SchemaError(where_, "expected an object");
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  template <typename T>
  std::optional<T> get(const std::string& key) {
    const json* v = raw(key);
    if (v == nullptr) return std::nullopt;
    try {
      return v->get<T>();
    } catch (const json::exception& e) {
      throw SchemaError(path(key), e.what());
    }
  }

  template <typename T>
  void read(const std::string& key, T& target) {
    if (auto v = get<T>(key)) target = std::move(*v);
  }

  std::string path(const std::string& key) const {
    return where_.empty() ? key : where_ + "." + key;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw SchemaError(path(key), "unknown key");
    }
  }

private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

std::size_t non_negative(ObjectReader& r, const std::string& key, std::size_t fallback) {
  const auto v = r.get<long long>(key);
  if (!v) return fallback;
  if (*v < 0) throw SchemaError(r.path(key), "must be non-negative");
  return static_cast<std::size_t>(*v);
}

Hyperparams read_hyperparams(const json& j, Hyperparams hp, const std::string& where) {
  ObjectReader r(j, where);
  r.read("learning_rate", hp.learning_rate);
  r.read("l2", hp.l2);
  hp.epochs = non_negative(r, "epochs", hp.epochs);
  r.read("svm_lambda", hp.svm_lambda);
  hp.n_trees = non_negative(r, "n_trees", hp.n_trees);
  hp.max_depth = non_negative(r, "max_depth", hp.max_depth);
  hp.max_features = non_negative(r, "max_features", hp.max_features);
  hp.n_rounds = non_negative(r, "n_rounds", hp.n_rounds);
  r.read("shrinkage", hp.shrinkage);
  hp.min_samples_leaf = non_negative(r, "min_samples_leaf", hp.min_samples_leaf);
  r.finish();
  return hp;
}

json hyperparams_json(const Hyperparams& hp) {
  return {{"learning_rate", hp.learning_rate}, {"l2", hp.l2},
          {"epochs", hp.epochs},               {"svm_lambda", hp.svm_lambda},
          {"n_trees", hp.n_trees},             {"max_depth", hp.max_depth},
          {"max_features", hp.max_features},   {"n_rounds", hp.n_rounds},
          {"shrinkage", hp.shrinkage},         {"min_samples_leaf", hp.min_samples_leaf}};
}

ModelKind model_kind_at(const std::string& name, const std::string& where) {
  const auto kind = parse_model_kind(name);
  if (!kind) throw SchemaError(where, "unknown model kind '" + name + "'");
  return *kind;
}

ServiceConfig read_service(const json& j, const std::string& where, ServiceConfig s,
                           std::vector<AgentPersona>* personas) {
  ObjectReader r(j, where);
  r.read("kind", s.kind);
  r.read("endpoint", s.endpoint);
  s.max_attempts = non_negative(r, "max_attempts", s.max_attempts);
  if (personas != nullptr) {
    if (auto names = r.get<std::vector<std::string>>("personas")) {
      personas->clear();
      for (const auto& n : *names) {
        const auto p = parse_persona(n);
        if (!p) throw SchemaError(r.path("personas"), "unknown persona '" + n + "'");
        personas->push_back(*p);
      }
      if (personas->empty()) throw SchemaError(r.path("personas"), "needs at least one persona");
    }
  }
  r.finish();
  if (s.kind != "mock" && s.kind != "http") {
    throw SchemaError(r.path("kind"), "expected \"mock\" or \"http\"");
  }
  if (s.kind == "http" && s.endpoint.empty()) {
    throw SchemaError(r.path("endpoint"), "required for kind \"http\"");
  }
  if (s.max_attempts == 0) throw SchemaError(r.path("max_attempts"), "must be positive");
  return s;
}

}  // namespace

PipelineConfig parse_config(std::string_view json_text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  PipelineConfig c;
  ObjectReader top(j, "");

  if (const json* d = top.raw("datasets")) {
    ObjectReader r(*d, "datasets");
    if (auto p = r.get<std::string>("train")) c.train = resolve(base_dir, *p);
    if (auto p = r.get<std::string>("val")) c.val = resolve(base_dir, *p);
    if (const json* tests = r.raw("test")) {
      if (!tests->is_array()) throw SchemaError("datasets.test", "expected an array");
      std::set<std::string> names;
      for (std::size_t i = 0; i < tests->size(); ++i) {
        ObjectReader t((*tests)[i], "datasets.test[" + std::to_string(i) + "]");
        const auto name = t.get<std::string>("name");
        const auto path = t.get<std::string>("path");
        t.finish();
        if (!name || name->empty()) throw SchemaError(t.path("name"), "required");
        if (!path) throw SchemaError(t.path("path"), "required");
        if (!names.insert(*name).second) throw SchemaError(t.path("name"), "duplicate name");
        c.test.push_back({*name, resolve(base_dir, *path)});
      }
    }
    r.finish();
  }

  if (const json* rt = top.raw("routing")) {
    ObjectReader r(*rt, "routing");
    r.read("tau_low", c.routing.tau_low);
    r.read("tau_high", c.routing.tau_high);
    c.routing.max_tokens = non_negative(r, "max_tokens", c.routing.max_tokens);
    r.finish();
  }
  try {
    c.routing.validate();
  } catch (const PreconditionError& e) {
    throw SchemaError("routing", e.what());
  }

  if (auto p = top.get<std::string>("pathway")) {
    if (*p == "ml") c.pathway = PathwayKind::Ml;
    else if (*p == "llm") c.pathway = PathwayKind::Llm;
    else throw SchemaError("pathway", "expected \"ml\" or \"llm\"");
  }

  if (const json* s = top.raw("stage1")) {
    ObjectReader r(*s, "stage1");
    r.read("kind", c.stage1.kind);
    r.read("endpoint", c.stage1.endpoint);
    c.stage1.baseline.epochs = non_negative(r, "epochs", c.stage1.baseline.epochs);
    r.read("learning_rate", c.stage1.baseline.learning_rate);
    r.read("l2", c.stage1.baseline.l2);
    r.read("bits", c.stage1.baseline.bits);
    r.finish();
    if (c.stage1.kind != "baseline" && c.stage1.kind != "remote") {
      throw SchemaError("stage1.kind", "expected \"baseline\" or \"remote\"");
    }
    if (c.stage1.kind == "remote" && c.stage1.endpoint.empty()) {
      throw SchemaError("stage1.endpoint", "required for kind \"remote\"");
    }
    if (c.stage1.baseline.bits < 1 || c.stage1.baseline.bits > 24) {
      throw SchemaError("stage1.bits", "must lie in [1, 24]");
    }
  }

  if (auto names = top.get<std::vector<std::string>>("roster")) {
    c.roster.clear();
    for (const auto& n : *names) {
      const auto kind = model_kind_at(n, "roster");
      if (std::find(c.roster.begin(), c.roster.end(), kind) != c.roster.end()) {
        throw SchemaError("roster", "duplicate model kind '" + n + "'");
      }
      c.roster.push_back(kind);
    }
  }
  for (auto kind : c.roster) c.hyperparams[kind] = default_hyperparams(kind);
  if (const json* h = top.raw("hyperparameters")) {
    if (!h->is_object()) throw SchemaError("hyperparameters", "expected an object");
    for (const auto& [name, overrides] : h->items()) {
      const auto kind = model_kind_at(name, "hyperparameters." + name);
      c.hyperparams[kind] =
          read_hyperparams(overrides, default_hyperparams(kind), "hyperparameters." + name);
    }
  }

  if (const json* cv = top.raw("cv")) {
    ObjectReader r(*cv, "cv");
    c.cv_folds = non_negative(r, "folds", 0);
    if (const json* grid = r.raw("grid")) {
      if (!grid->is_object()) throw SchemaError("cv.grid", "expected an object");
      for (const auto& [name, points] : grid->items()) {
        const std::string where = "cv.grid." + name;
        const auto kind = model_kind_at(name, where);
        if (!points.is_array() || points.empty()) {
          throw SchemaError(where, "expected a non-empty array");
        }
        const Hyperparams base =
            c.hyperparams.count(kind) ? c.hyperparams.at(kind) : default_hyperparams(kind);
        for (std::size_t i = 0; i < points.size(); ++i) {
          c.cv_grid[kind].push_back(
              read_hyperparams(points[i], base, where + "[" + std::to_string(i) + "]"));
        }
      }
    }
    r.finish();
    if (c.cv_folds == 1) throw SchemaError("cv.folds", "needs at least 2 folds");
  }

  if (auto cap = top.get<double>("cap")) c.cap = *cap;
  if (!(c.cap > 0.0 && c.cap <= 1.0)) throw SchemaError("cap", "must lie in (0, 1]");

  if (const json* o = top.raw("optimizer")) {
    ObjectReader r(*o, "optimizer");
    c.optimizer.restarts = non_negative(r, "restarts", c.optimizer.restarts);
    r.read("initial_step", c.optimizer.initial_step);
    r.read("min_step", c.optimizer.min_step);
    r.read("threshold", c.optimizer.threshold);
    r.finish();
    if (!(c.optimizer.min_step > 0.0 && c.optimizer.initial_step >= c.optimizer.min_step)) {
      throw SchemaError("optimizer", "need 0 < min_step <= initial_step");
    }
  }

  if (const json* a = top.raw("analyst")) c.analyst = read_service(*a, "analyst", c.analyst, nullptr);
  if (const json* a = top.raw("agents")) {
    c.agents = read_service(*a, "agents", c.agents, &c.personas);
  }

  if (const json* h = top.raw("http")) {
    ObjectReader r(*h, "http");
    c.http.retry.max_attempts = non_negative(r, "max_attempts", c.http.retry.max_attempts);
    c.http.retry.initial_backoff = std::chrono::milliseconds(
        non_negative(r, "initial_backoff_ms", static_cast<std::size_t>(c.http.retry.initial_backoff.count())));
    c.http.connect_timeout = std::chrono::milliseconds(
        non_negative(r, "connect_timeout_ms", static_cast<std::size_t>(c.http.connect_timeout.count())));
    c.http.read_timeout = std::chrono::milliseconds(
        non_negative(r, "read_timeout_ms", static_cast<std::size_t>(c.http.read_timeout.count())));
    r.finish();
    if (c.http.retry.max_attempts == 0) throw SchemaError("http.max_attempts", "must be positive");
  }

  c.parallelism = non_negative(top, "parallelism", c.parallelism);
  if (c.parallelism == 0) throw SchemaError("parallelism", "must be positive");
  if (auto p = top.get<std::string>("cache")) c.cache = resolve(base_dir, *p);
  if (auto s = top.get<std::uint64_t>("seed")) c.seed = *s;
  if (auto p = top.get<std::string>("output_dir")) c.output_dir = resolve(base_dir, *p);
  else c.output_dir = resolve(base_dir, c.output_dir);
  top.read("min_coverage", c.min_coverage);
  if (!(c.min_coverage >= 0.0 && c.min_coverage <= 1.0)) {
    throw SchemaError("min_coverage", "must lie in [0, 1]");
  }
  if (auto grid = top.get<std::vector<std::pair<double, double>>>("sweep_grid")) {
    if (grid->empty()) throw SchemaError("sweep_grid", "must not be empty");
    for (const auto& [lo, hi] : *grid) {
      if (!(0.0 <= lo && lo < hi && hi <= 1.0)) {
        throw SchemaError("sweep_grid", "each pair needs 0 <= tau_low < tau_high <= 1");
      }
    }
    c.sweep_grid = std::move(*grid);
  }
  top.finish();
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  return parse_config(read_file(path), fs::absolute(path).parent_path());
}

std::string resolved_config_json(const PipelineConfig& c) {
  json tests = json::array();
  for (const auto& t : c.test) tests.push_back({{"name", t.name}, {"path", t.path.string()}});
  json datasets = {{"test", tests}};
  if (c.train) datasets["train"] = c.train->string();
  if (c.val) datasets["val"] = c.val->string();

  json roster = json::array();
  json hyper = json::object();
  for (auto kind : c.roster) {
    roster.push_back(std::string(to_string(kind)));
    hyper[std::string(to_string(kind))] = hyperparams_json(c.hyperparams.at(kind));
  }
  json grid = json::object();
  for (const auto& [kind, points] : c.cv_grid) {
    json arr = json::array();
    for (const auto& hp : points) arr.push_back(hyperparams_json(hp));
    grid[std::string(to_string(kind))] = arr;
  }
  json personas = json::array();
  for (auto p : c.personas) personas.push_back(std::string(to_string(p)));

  json stage1 = {{"kind", c.stage1.kind},
                 {"epochs", c.stage1.baseline.epochs},
                 {"learning_rate", c.stage1.baseline.learning_rate},
                 {"l2", c.stage1.baseline.l2},
                 {"bits", c.stage1.baseline.bits}};
  if (!c.stage1.endpoint.empty()) stage1["endpoint"] = c.stage1.endpoint;
  auto service = [](const ServiceConfig& s) {
    json j = {{"kind", s.kind}, {"max_attempts", s.max_attempts}};
    if (!s.endpoint.empty()) j["endpoint"] = s.endpoint;
    return j;
  };
  json agents = service(c.agents);
  agents["personas"] = personas;

  const json j = {
      {"datasets", datasets},
      {"routing",
       {{"tau_low", c.routing.tau_low},
        {"tau_high", c.routing.tau_high},
        {"max_tokens", c.routing.max_tokens}}},
      {"pathway", std::string(to_string(c.pathway))},
      {"stage1", stage1},
      {"roster", roster},
      {"hyperparameters", hyper},
      {"cv", {{"folds", c.cv_folds}, {"grid", grid}}},
      {"cap", c.cap},
      {"optimizer",
       {{"restarts", c.optimizer.restarts},
        {"initial_step", c.optimizer.initial_step},
        {"min_step", c.optimizer.min_step},
        {"threshold", c.optimizer.threshold}}},
      {"analyst", service(c.analyst)},
      {"agents", agents},
      {"http",
       {{"max_attempts", c.http.retry.max_attempts},
        {"initial_backoff_ms", c.http.retry.initial_backoff.count()},
        {"connect_timeout_ms", c.http.connect_timeout.count()},
        {"read_timeout_ms", c.http.read_timeout.count()}}},
      {"parallelism", c.parallelism},
      {"cache", cache_path(c).string()},
      {"seed", c.seed},
      {"output_dir", c.output_dir.string()},
      {"min_coverage", c.min_coverage},
      {"sweep_grid", c.sweep_grid},
  };
  return j.dump(2) + "\n";
}

fs::path cache_path(const PipelineConfig& c) {
  return c.cache.empty() ? c.output_dir / "feature_cache.jsonl" : c.cache;
}
fs::path matrix_path(const PipelineConfig& c, std::string_view dataset) {
  return c.output_dir / ("features_" + std::string(dataset) + ".jsonl");
}
fs::path stage1_model_path(const PipelineConfig& c) { return c.output_dir / "model_stage1.json"; }
fs::path model_path(const PipelineConfig& c, ModelKind kind) {
  return c.output_dir / ("model_" + std::string(to_string(kind)) + ".json");
}
fs::path weights_path(const PipelineConfig& c) { return c.output_dir / "weights.json"; }

// ---------------------------------------------------------------------------
// Commands

namespace {

void prepare_output(const PipelineConfig& c) {
  fs::create_directories(c.output_dir);
  write_file_atomic(c.output_dir / "resolved_config.json", resolved_config_json(c));
}

Dataset load_split(const std::optional<fs::path>& path, Split split, const std::string& name) {
  if (!path) {
    throw PreconditionError("the " + name + " split is not configured (datasets." + name + ")");
  }
  return load_dataset(*path, format_from_path(*path), split, name);
}

std::vector<Dataset> load_tests(const PipelineConfig& c) {
  if (c.test.empty()) throw PreconditionError("no test datasets configured (datasets.test)");
  std::vector<Dataset> out;
  for (const auto& t : c.test) {
    out.push_back(load_dataset(t.path, format_from_path(t.path), Split::Test, t.name));
  }
  return out;
}

std::unique_ptr<ChatClient> make_client(const ServiceConfig& s, const HttpOptions& http) {
  if (s.kind == "http") return std::make_unique<HttpChatClient>(s.endpoint, http);
  return std::make_unique<KeywordChatClient>();
}

std::unique_ptr<Scorer> load_stage1(const PipelineConfig& c) {
  if (c.stage1.kind == "remote") return std::make_unique<RemoteScorer>(c.stage1.endpoint, c.http);
  return std::make_unique<BaselineScorer>(BaselineScorer::load(stage1_model_path(c)));
}

std::vector<std::string> roster_names(const PipelineConfig& c) {
  std::vector<std::string> names{"stage1"};
  for (auto kind : c.roster) names.emplace_back(to_string(kind));
  return names;
}

/// Reads the matrix file when present, otherwise extracts and writes it.
FeatureMatrix features_for(const PipelineConfig& c, const Dataset& ds, ChatClient& analyst,
                           FeatureCache& cache) {
  const auto path = matrix_path(c, ds.name());
  if (fs::exists(path)) return read_feature_matrix(path, ds);
  auto m = extract_features(ds, analyst, cache, {c.parallelism, c.analyst.max_attempts});
  write_feature_matrix(path, ds, m);
  return m;
}

std::vector<double> score_all(const Scorer& scorer, const Dataset& ds, std::size_t parallelism) {
  std::vector<double> p(ds.size());
  const auto errors = parallel_for(ds.size(), parallelism,
                                   [&](std::size_t i) { p[i] = scorer.score(ds[i].text).value(); });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return p;
}

std::vector<TrainedModel> load_models(const PipelineConfig& c) {
  std::vector<TrainedModel> models;
  for (auto kind : c.roster) {
    models.push_back(TrainedModel::load(model_path(c, kind)));
    if (models.back().kind() != kind) {
      throw SchemaError("roster", model_path(c, kind).string() + " holds a different model kind");
    }
  }
  return models;
}

EnsembleWeights load_weights(const PipelineConfig& c) {
  auto wf = load_weight_file(weights_path(c));
  if (wf.weights.roster() != roster_names(c)) {
    throw SchemaError("roster", "weights.json was trained for a different roster");
  }
  return wf.weights;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int cmd_extract(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    prepare_output(c);
    std::vector<Dataset> sets;
    if (c.train) sets.push_back(load_split(c.train, Split::Train, "train"));
    if (c.val) sets.push_back(load_split(c.val, Split::Val, "val"));
    for (auto& t : load_tests(c)) sets.push_back(std::move(t));

    FeatureCache cache(cache_path(c));
    auto analyst = make_client(c.analyst, c.http);
    std::vector<FeatureMatrix> matrices;
    std::vector<std::string> failed;
    for (const auto& ds : sets) {
      try {
        matrices.push_back(
            extract_features(ds, *analyst, cache, {c.parallelism, c.analyst.max_attempts}));
      } catch (const ExtractionError& e) {
        err << "extraction failed for " << e.failed_ids().size() << " post(s) in " << ds.name()
            << ": " << e.what() << "\n";
        for (const auto& id : e.failed_ids()) failed.push_back(ds.name() + "/" + id);
      }
    }
    if (!failed.empty()) {
      err << "failed post ids:";
      for (const auto& id : failed) err << " " << id;
      err << "\nno feature matrices written\n";
      return 1;
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
      write_feature_matrix(matrix_path(c, sets[i].name()), sets[i], matrices[i]);
      out << sets[i].name() << ": " << matrices[i].size() << " rows -> "
          << matrix_path(c, sets[i].name()).string() << "\n";
    }
    return 0;
  });
}

int cmd_train(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Dataset train = load_split(c.train, Split::Train, "train");
    const Dataset val = load_split(c.val, Split::Val, "val");
    prepare_output(c);

    std::unique_ptr<Scorer> stage1;
    if (c.stage1.kind == "baseline") {
      BaselineConfig bc = c.stage1.baseline;
      bc.seed = c.seed;
      try {
        auto trained = train_baseline(train, bc);
        trained.save(stage1_model_path(c));
        stage1 = std::make_unique<BaselineScorer>(std::move(trained));
      } catch (const DegenerateData& e) {
        throw DegenerateData("train split: " + std::string(e.what()));
      }
      out << "stage1 baseline -> " << stage1_model_path(c).string() << "\n";
    } else {
      stage1 = load_stage1(c);
    }
    if (c.pathway == PathwayKind::Llm) return 0;

    FeatureCache cache(cache_path(c));
    auto analyst = make_client(c.analyst, c.http);
    const auto X_train = features_for(c, train, *analyst, cache);
    const auto X_val = features_for(c, val, *analyst, cache);
    const auto y_train = train.gold_labels();
    const auto y_val = val.gold_labels();

    std::vector<TrainedModel> models;
    for (std::size_t i = 0; i < c.roster.size(); ++i) {
      const auto kind = c.roster[i];
      const std::uint64_t seed = c.seed + 1 + i;
      Hyperparams hp = c.hyperparams.at(kind);
      try {
        if (c.cv_folds >= 2 && c.cv_grid.count(kind)) {
          const auto cv = cross_validate(kind, X_train, y_train, c.cv_folds, c.cv_grid.at(kind), seed);
          hp = cv.best;
          out << to_string(kind) << ": cv picked grid point " << cv.best_index << " (mean F1 "
              << cv.best_mean_f1 << ")\n";
        }
        models.push_back(riskcascade::train(kind, X_train, y_train, hp, seed));
      } catch (const DegenerateData& e) {
        throw DegenerateData("train split: " + std::string(e.what()));
      }
      models.back().save(model_path(c, kind));
      out << to_string(kind) << " -> " << model_path(c, kind).string() << "\n";
    }

    const auto p0 = score_all(*stage1, val, c.parallelism);
    std::vector<ScoreVector> scores(val.size());
    for (std::size_t r = 0; r < val.size(); ++r) {
      scores[r].push_back(p0[r]);
      for (const auto& m : models) scores[r].push_back(predict_proba(m, X_val[r]).value());
    }
    OptimizedWeights opt;
    try {
      opt = optimize_weights(scores, y_val, c.cap, c.seed, c.optimizer);
    } catch (const DegenerateData& e) {
      throw DegenerateData("val split: " + std::string(e.what()));
    }
    save_weight_file(weights_path(c), {EnsembleWeights(roster_names(c), opt.weights, c.cap), opt.f1});
    out << "weights -> " << weights_path(c).string() << " (val F1 " << opt.f1 << ", uniform "
        << opt.uniform_f1 << ")\n";
    return 0;
  });
}

int cmd_route(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto tests = load_tests(c);
    prepare_output(c);
    const auto stage1 = load_stage1(c);
    for (const auto& ds : tests) {
      const auto p = score_all(*stage1, ds, c.parallelism);
      std::vector<RoutingDecision> decisions;
      std::string lines;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto tokens = token_length(ds[i].text);
        const auto d = route(tokens, Probability(p[i]), c.routing);
        json j = {{"id", ds[i].id}, {"stage1_prob", p[i]}, {"tokens", tokens},
                  {"decision", d.accepted() ? "accept" : "escalate"}};
        if (d.accepted()) j["label"] = std::string(to_string(*d.label()));
        else j["reason"] = std::string(to_string(*d.reason()));
        lines += j.dump() + "\n";
        decisions.push_back(d);
      }
      const auto routing_path = c.output_dir / ("routing_" + ds.name() + ".jsonl");
      write_file_atomic(routing_path, lines);
      if (decisions.empty()) {
        out << ds.name() << ": empty dataset\n";
        continue;
      }
      const auto cost = stage_cost_report(decisions);
      out << ds.name() << ": " << cost.accepted << " accepted, " << cost.escalated
          << " escalated (stage1 fraction " << cost.stage1_fraction << ") -> "
          << routing_path.string() << "\n";
    }
    return 0;
  });
}

int cmd_evaluate(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto tests = load_tests(c);
    prepare_output(c);
    const auto stage1 = load_stage1(c);

    FeatureCache cache(cache_path(c));
    auto analyst = make_client(c.analyst, c.http);
    auto agents = make_client(c.agents, c.http);
    std::vector<TrainedModel> models;
    std::optional<EnsembleWeights> weights;
    if (c.pathway == PathwayKind::Ml) {
      models = load_models(c);
      weights = load_weights(c);
    }

    const std::string cascade_method = "cascade_" + std::string(to_string(c.pathway));
    std::vector<ReportRow> rows;
    std::optional<MetricSet> ref_stage1, ref_cascade;
    std::size_t total = 0, failed = 0;
    for (const auto& ds : tests) {
      const auto gold = ds.gold_labels();
      std::optional<FeatureMatrix> matrix;
      std::unique_ptr<FeatureProvider> provider;
      if (c.pathway == PathwayKind::Ml) {
        if (fs::exists(matrix_path(c, ds.name()))) {
          matrix = read_feature_matrix(matrix_path(c, ds.name()), ds);
          provider = std::make_unique<MatrixFeatureProvider>(*matrix);
        } else {
          provider = std::make_unique<AnalystFeatureProvider>(*analyst, cache, c.analyst.max_attempts);
        }
      }
      Stage2Pathway stage2 = c.pathway == PathwayKind::Ml
                                 ? Stage2Pathway(MlVotingPathway{models, *weights, provider.get(),
                                                                 c.optimizer.threshold})
                                 : Stage2Pathway(AgentVotingPathway{c.personas, agents.get()});
      const auto results = run_cascade(ds, *stage1, c.routing, stage2, {c.parallelism});
      write_predictions(c.output_dir / ("predictions_" + ds.name() + ".jsonl"), results);

      std::vector<Label> alone;
      for (const auto& r : results) {
        alone.push_back(r.stage1_prob ? label_from_bool(*r.stage1_prob >= 0.5) : Label::Suicide);
        ++total;
        if (r.provenance == Provenance::Fallback && r.error) ++failed;
      }
      const auto cascade_labels = predicted_labels(results);

      ReportRow s1{ds.name(), "stage1", confusion(alone, gold), {}, {}, {}};
      s1.metrics = metrics(s1.counts);
      ReportRow cas{ds.name(), cascade_method, confusion(cascade_labels, gold), {}, {}, {}};
      cas.metrics = metrics(cas.counts);
      const auto decisions = routing_decisions(results);
      if (!decisions.empty()) cas.cost = stage_cost_report(decisions);
      if (!ref_stage1) {
        ref_stage1 = s1.metrics;
        ref_cascade = cas.metrics;
      } else {
        s1.gaps = cross_domain_gap(*ref_stage1, s1.metrics);
        cas.gaps = cross_domain_gap(*ref_cascade, cas.metrics);
      }
      rows.push_back(std::move(s1));
      rows.push_back(std::move(cas));
    }
    write_report(c.output_dir / "report.jsonl", rows);
    out << render_table(rows);
    if (failed > 0) err << failed << " of " << total << " post(s) fell back after errors\n";
    return total > 0 && failed == total ? 1 : 0;
  });
}

int cmd_sweep_thresholds(const PipelineConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Dataset val = load_split(c.val, Split::Val, "val");
    prepare_output(c);
    const auto stage1 = load_stage1(c);
    const auto gold = val.gold_labels();
    const auto p0 = score_all(*stage1, val, c.parallelism);
    std::vector<std::size_t> tokens;
    for (const auto& post : val) tokens.push_back(token_length(post.text));

    std::vector<Label> stage2(val.size());
    if (c.pathway == PathwayKind::Ml) {
      FeatureCache cache(cache_path(c));
      auto analyst = make_client(c.analyst, c.http);
      const auto X = features_for(c, val, *analyst, cache);
      const auto models = load_models(c);
      const auto weights = load_weights(c);
      for (std::size_t i = 0; i < val.size(); ++i) {
        ScoreVector s{p0[i]};
        for (const auto& m : models) s.push_back(predict_proba(m, X[i]).value());
        stage2[i] = ml_vote(s, weights, c.optimizer.threshold).label;
      }
    } else {
      auto agents = make_client(c.agents, c.http);
      const auto errors = parallel_for(val.size(), c.parallelism, [&](std::size_t i) {
        std::vector<Verdict> verdicts;
        for (auto persona : c.personas) {
          verdicts.push_back(agent_classify(*agents, persona, val[i].text));
        }
        stage2[i] = llm_vote(verdicts, label_from_bool(p0[i] >= 0.5));
      });
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }

    const auto sweep =
        sweep_thresholds(p0, tokens, stage2, gold, c.sweep_grid, c.routing.max_tokens, c.min_coverage);
    std::string lines;
    for (const auto& pt : sweep.points) {
      lines += json{{"tau_low", pt.tau_low}, {"tau_high", pt.tau_high}, {"f1", pt.f1},
                    {"coverage", pt.coverage}}
                   .dump() +
               "\n";
      out << "tau_low " << pt.tau_low << "  tau_high " << pt.tau_high << "  F1 " << pt.f1
          << "  coverage " << pt.coverage << "\n";
    }
    write_file_atomic(c.output_dir / "sweep.jsonl", lines);
    if (!sweep.best) {
      err << "no grid point reaches min_coverage " << c.min_coverage << "\n";
      return 1;
    }
    const json best = {{"tau_low", sweep.best->tau_low}, {"tau_high", sweep.best->tau_high},
                       {"f1", sweep.best->f1}, {"coverage", sweep.best->coverage}};
    write_file_atomic(c.output_dir / "thresholds.json", best.dump(2) + "\n");
    out << "best: tau_low " << sweep.best->tau_low << ", tau_high " << sweep.best->tau_high
        << " (F1 " << sweep.best->f1 << ", coverage " << sweep.best->coverage << ")\n";
    return 0;
  });
}

}  // namespace riskcascade
