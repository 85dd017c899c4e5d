#include "riskcascade/analysis.hpp"

#include <nlohmann/json.hpp>

#include "prompt_text.hpp"
#include "riskcascade/util.hpp"

namespace riskcascade {

using nlohmann::json;

std::string_view to_string(DistressLevel level) noexcept {
  switch (level) {
    case DistressLevel::Low: return "low";
    case DistressLevel::Medium: return "medium";
    case DistressLevel::High: return "high";
    case DistressLevel::Unknown: return "unknown";
  }
  return "unknown";
}

const std::array<std::string_view, kFeatureDim>& feature_names() noexcept {
  static constexpr std::array<std::string_view, kFeatureDim> kNames = {
      "suicide_intent", "distress_low",  "distress_medium", "distress_high",  "distress_unknown",
      "has_plan",       "is_metaphor",   "farewell_hint",   "reasoning_length"};
  return kNames;
}

bool is_valid_feature_vector(const FeatureVector& v) noexcept {
  auto binary = [](double x) { return x == 0.0 || x == 1.0; };
  for (auto slot : {kSuicideIntent, kHasPlan, kIsMetaphor, kFarewellHint}) {
    if (!binary(v[slot])) return false;
  }
  int hot = 0;
  for (auto slot : {kDistressLow, kDistressMedium, kDistressHigh, kDistressUnknown}) {
    if (!binary(v[slot])) return false;
    hot += v[slot] == 1.0 ? 1 : 0;
  }
  const double len = v[kReasoningLength];
  return hot == 1 && len >= 0.0 && std::floor(len) == len;
}

std::string_view analyst_system_prompt() noexcept { return prompt_text::kAnalyst; }

PromptPair build_analyst_prompt(std::string_view text) {
  if (text.empty()) {
    throw PreconditionError("analyst prompt requires non-empty text");
  }
  return {std::string(prompt_text::kAnalyst), std::string(text)};
}

namespace {

// Index one past the '}' closing the object opened at `open`, or npos.
std::size_t balanced_object_end(std::string_view raw, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < raw.size(); ++i) {
    const char c = raw[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

json first_json_object(std::string_view raw) {
  for (auto open = raw.find('{'); open != std::string_view::npos; open = raw.find('{', open + 1)) {
    const auto end = balanced_object_end(raw, open);
    if (end == std::string_view::npos) {
      break;
    }
    auto parsed = json::parse(raw.substr(open, end - open), nullptr, /*allow_exceptions=*/false);
    if (!parsed.is_discarded() && parsed.is_object()) {
      return parsed;
    }
  }
  throw ParseError("no JSON object found in analyst reply");
}

bool required_bool(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) {
    throw SchemaError(field, "missing");
  }
  if (!it->is_boolean()) {
    throw SchemaError(field, "expected a JSON boolean, got " + std::string(it->type_name()));
  }
  return it->get<bool>();
}

DistressLevel distress_from_json(const json& obj) {
  auto it = obj.find("emotional_distress_level");
  if (it == obj.end() || !it->is_string()) {
    return DistressLevel::Unknown;
  }
  const auto v = to_lower_ascii(trim(it->get<std::string>()));
  if (v == "low") return DistressLevel::Low;
  if (v == "medium") return DistressLevel::Medium;
  if (v == "high") return DistressLevel::High;
  return DistressLevel::Unknown;
}

// Unicode scalar values in a UTF-8 string.
std::size_t utf8_length(std::string_view s) noexcept {
  std::size_t n = 0;
  for (unsigned char c : s) {
    n += (c & 0xC0) != 0x80 ? 1 : 0;
  }
  return n;
}

json analysis_to_json(const FundamentalAnalysis& a) {
  json obj;
  obj["suicide_intent"] = a.suicide_intent;
  obj["emotional_distress_level"] = std::string(to_string(a.emotional_distress_level));
  obj["has_plan"] = a.has_plan;
  obj["is_metaphor"] = a.is_metaphor;
  obj["farewell_hint"] = a.farewell_hint;
  obj["reasoning"] = a.reasoning;
  return obj;
}

FundamentalAnalysis analysis_from_json(const json& obj) {
  FundamentalAnalysis a;
  a.suicide_intent = required_bool(obj, "suicide_intent");
  a.emotional_distress_level = distress_from_json(obj);
  a.has_plan = required_bool(obj, "has_plan");
  a.is_metaphor = required_bool(obj, "is_metaphor");
  a.farewell_hint = required_bool(obj, "farewell_hint");
  if (auto it = obj.find("reasoning"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) {
      throw SchemaError("reasoning", "expected a string");
    }
    a.reasoning = it->get<std::string>();
  }
  return a;
}

}  // namespace

FundamentalAnalysis parse_analysis(std::string_view raw) {
  return analysis_from_json(first_json_object(raw));
}

std::string serialize_analysis(const FundamentalAnalysis& a) { return analysis_to_json(a).dump(); }

FeatureVector vectorize(const FundamentalAnalysis& a) {
  FeatureVector v;
  v[kSuicideIntent] = a.suicide_intent ? 1.0 : 0.0;
  v[kDistressLow + static_cast<std::size_t>(a.emotional_distress_level)] = 1.0;
  v[kHasPlan] = a.has_plan ? 1.0 : 0.0;
  v[kIsMetaphor] = a.is_metaphor ? 1.0 : 0.0;
  v[kFarewellHint] = a.farewell_hint ? 1.0 : 0.0;
  v[kReasoningLength] = static_cast<double>(utf8_length(a.reasoning));
  return v;
}

// ---------------------------------------------------------------------------
// FeatureCache

FeatureCache::FeatureCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_);
  if (!in) {
    return;  // cold cache
  }
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto entry = json::parse(line, nullptr, false);
    if (entry.is_discarded() || !entry.is_object() || !entry.contains("key") ||
        !entry.contains("analysis")) {
      throw FormatError(row, "corrupt feature-cache entry in " + path_->string());
    }
    if (entry.value("prompt_version", "") != kAnalystPromptVersion) {
      continue;  // stale prompt
    }
    try {
      entries_.insert_or_assign(entry["key"].get<std::string>(),
                                analysis_from_json(entry["analysis"]));
    } catch (const Error& e) {
      throw FormatError(row, std::string("bad cached analysis: ") + e.what());
    }
  }
}

std::string FeatureCache::key_for(std::string_view text) { return sha256_hex(text); }

std::optional<FundamentalAnalysis> FeatureCache::lookup(std::string_view text) const {
  const auto key = key_for(text);
  std::shared_lock lock(mutex_);
  if (auto it = entries_.find(key); it != entries_.end()) {
    return it->second;
  }
  return std::nullopt;
}

void FeatureCache::insert(std::string_view text, const FundamentalAnalysis& analysis) {
  auto key = key_for(text);
  std::unique_lock lock(mutex_);
  if (entries_.contains(key)) {
    return;
  }
  if (path_) {
    if (path_->has_parent_path()) {
      std::filesystem::create_directories(path_->parent_path());
    }
    std::ofstream out(*path_, std::ios::app | std::ios::binary);
    if (!out) {
      throw IoError("cannot append to feature cache " + path_->string());
    }
    const json entry = {{"key", key},
                        {"prompt_version", std::string(kAnalystPromptVersion)},
                        {"analysis", analysis_to_json(analysis)}};
    out << entry.dump() << '\n';
  }
  entries_.emplace(std::move(key), analysis);
}

std::size_t FeatureCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

// ---------------------------------------------------------------------------
// Extraction

FundamentalAnalysis analyze_post(const Post& post, ChatClient& analyst, FeatureCache& cache,
                                 std::size_t max_attempts) {
  if (auto hit = cache.lookup(post.text)) {
    return *hit;
  }
  const auto prompt = build_analyst_prompt(post.text);
  std::string cause;
  for (std::size_t attempt = 0; attempt < std::max<std::size_t>(1, max_attempts); ++attempt) {
    try {
      auto analysis = parse_analysis(analyst.chat(prompt));
      cache.insert(post.text, analysis);
      return analysis;
    } catch (const ParseError& e) {
      cause = e.what();
    } catch (const SchemaError& e) {
      cause = e.what();
    } catch (const TransportError& e) {
      throw AnalystError(post.id, e.what());
    } catch (const ProtocolError& e) {
      throw AnalystError(post.id, e.what());
    }
  }
  throw AnalystError(post.id, cause);
}

FeatureMatrix extract_features(const Dataset& ds, ChatClient& analyst, FeatureCache& cache,
                               const ExtractOptions& options) {
  if (options.parallelism == 0) {
    throw PreconditionError("parallelism must be positive");
  }
  FeatureMatrix matrix(ds.size());
  auto errors = parallel_for(ds.size(), options.parallelism, [&](std::size_t i) {
    matrix[i] = vectorize(analyze_post(ds[i], analyst, cache, options.max_attempts));
  });
  std::vector<std::string> failed;
  std::string first_cause;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    failed.push_back(ds[i].id);
    if (first_cause.empty()) {
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        first_cause = e.what();
      }
    }
  }
  if (!failed.empty()) {
    throw ExtractionError(std::move(failed), first_cause);
  }
  return matrix;
}

void write_feature_matrix(const std::filesystem::path& path, const Dataset& ds,
                          const FeatureMatrix& matrix) {
  if (matrix.size() != ds.size()) {
    throw DimensionError("feature matrix has " + std::to_string(matrix.size()) +
                         " rows for a dataset of " + std::to_string(ds.size()));
  }
  std::string out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out += json{{"id", ds[i].id}, {"features", matrix[i].values}}.dump();
    out += '\n';
  }
  write_file_atomic(path, out);
}

FeatureMatrix read_feature_matrix(const std::filesystem::path& path, const Dataset& ds) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read feature matrix " + path.string());
  }
  FeatureMatrix matrix;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("id") ||
        !obj.contains("features")) {
      throw FormatError(row, "malformed feature-matrix row in " + path.string());
    }
    if (matrix.size() >= ds.size() || obj["id"] != ds[matrix.size()].id) {
      throw FormatError(row, "feature matrix is not aligned with dataset " + ds.name());
    }
    const auto& f = obj["features"];
    if (!f.is_array() || f.size() != kFeatureDim) {
      throw DimensionError("feature row " + std::to_string(row) + " does not have 9 values");
    }
    FeatureVector v;
    for (std::size_t k = 0; k < kFeatureDim; ++k) {
      v[k] = f[k].get<double>();
    }
    matrix.push_back(v);
  }
  if (matrix.size() != ds.size()) {
    throw FormatError(row, "feature matrix has fewer rows than dataset " + ds.name());
  }
  return matrix;
}

}  // namespace riskcascade
