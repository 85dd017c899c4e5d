#include "riskcascade/scorers.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "prompt_text.hpp"
#include "riskcascade/util.hpp"

namespace riskcascade {

using nlohmann::json;

std::string_view to_string(AgentPersona persona) noexcept {
  switch (persona) {
    case AgentPersona::Bullish: return "bullish";
    case AgentPersona::Bearish: return "bearish";
    case AgentPersona::Expert: return "expert";
  }
  return "expert";
}

std::optional<AgentPersona> parse_persona(std::string_view name) noexcept {
  const auto n = to_lower_ascii(trim(name));
  if (n == "bullish") return AgentPersona::Bullish;
  if (n == "bearish") return AgentPersona::Bearish;
  if (n == "expert") return AgentPersona::Expert;
  return std::nullopt;
}

std::string_view persona_system_prompt(AgentPersona persona) noexcept {
  switch (persona) {
    case AgentPersona::Bullish: return prompt_text::kBullish;
    case AgentPersona::Bearish: return prompt_text::kBearish;
    case AgentPersona::Expert: return prompt_text::kExpert;
  }
  return prompt_text::kExpert;
}

std::optional<Label> Verdict::label() const noexcept {
  switch (kind_) {
    case Kind::Suicide: return Label::Suicide;
    case Kind::NonSuicide: return Label::NonSuicide;
    case Kind::Abstain: return std::nullopt;
  }
  return std::nullopt;
}

std::string_view to_string(Verdict::Kind kind) noexcept {
  switch (kind) {
    case Verdict::Kind::Suicide: return "suicide";
    case Verdict::Kind::NonSuicide: return "non_suicide";
    case Verdict::Kind::Abstain: return "abstain";
  }
  return "abstain";
}

namespace {

std::optional<Label> label_line(std::string_view line) {
  std::string s;
  s.reserve(line.size());
  for (char c : line) {
    if (c != '*' && c != '`') {
      s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  std::string_view v = trim(s);
  constexpr std::string_view kKey = "label";
  if (!v.starts_with(kKey)) {
    return std::nullopt;
  }
  v = trim(v.substr(kKey.size()));
  if (!v.starts_with(':')) {
    return std::nullopt;
  }
  v = trim(v.substr(1));
  while (!v.empty() && (v.back() == '.' || std::isspace(static_cast<unsigned char>(v.back())))) {
    v.remove_suffix(1);
  }
  if (v.starts_with('[') && v.ends_with(']')) {
    v = trim(v.substr(1, v.size() - 2));
  }
  if (v == "suicide") return Label::Suicide;
  if (v == "non_suicide") return Label::NonSuicide;
  return std::nullopt;
}

}  // namespace

Verdict parse_agent_reply(std::string_view reply) noexcept {
  try {
    std::vector<std::string_view> lines;
    for (std::size_t from = 0; from <= reply.size();) {
      const auto nl = reply.find('\n', from);
      const auto to = nl == std::string_view::npos ? reply.size() : nl;
      lines.push_back(reply.substr(from, to - from));
      from = to + 1;
    }
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
      if (auto label = label_line(*it)) {
        return Verdict::of(*label);
      }
    }
    return Verdict::abstain(std::string(reply));
  } catch (...) {
    return Verdict::abstain("unparsable reply");
  }
}

Verdict agent_classify(ChatClient& client, AgentPersona persona, std::string_view text) noexcept {
  try {
    const auto reply =
        client.chat(PromptPair{std::string(persona_system_prompt(persona)), std::string(text)});
    return parse_agent_reply(reply);
  } catch (const std::exception& e) {
    return Verdict::abstain(e.what());
  } catch (...) {
    return Verdict::abstain("unknown failure");
  }
}

// ---------------------------------------------------------------------------
// Baseline

namespace {

constexpr std::string_view kBaselineMagic = "riskcascade.baseline";
constexpr int kBaselineFormat = 1;

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct SparseDoc {
  std::vector<std::pair<std::size_t, double>> entries;  // sorted by bucket
};

SparseDoc hashed_features(std::string_view text, unsigned bits) {
  const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
  std::vector<std::size_t> buckets;
  for (const auto& tok : baseline_tokens(text)) {
    buckets.push_back(static_cast<std::size_t>(fnv1a(tok) & mask));
  }
  std::sort(buckets.begin(), buckets.end());
  SparseDoc doc;
  for (std::size_t i = 0; i < buckets.size();) {
    std::size_t j = i;
    while (j < buckets.size() && buckets[j] == buckets[i]) ++j;
    doc.entries.emplace_back(buckets[i], static_cast<double>(j - i));
    i = j;
  }
  double norm = 0.0;
  for (const auto& [b, v] : doc.entries) norm += v * v;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (auto& [b, v] : doc.entries) v /= norm;
  }
  return doc;
}

double margin(const SparseDoc& doc, const std::vector<double>& w, double bias) {
  double z = bias;
  for (const auto& [b, v] : doc.entries) z += w[b] * v;
  return z;
}

// log(1 + exp(-y z)) with y in {-1, +1}
double logistic_loss(double z, double y) {
  const double m = -y * z;
  return m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
}

void check_bits(unsigned bits) {
  if (bits < 1 || bits > 24) {
    throw PreconditionError("hash bits must be in [1, 24], got " + std::to_string(bits));
  }
}

}  // namespace

std::vector<std::string> baseline_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80 || c == '\'') {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

BaselineScorer::BaselineScorer(unsigned bits, std::vector<double> weights, double bias,
                               BaselineConfig config, std::vector<double> training_loss)
    : bits_(bits),
      weights_(std::move(weights)),
      bias_(bias),
      config_(config),
      training_loss_(std::move(training_loss)) {
  check_bits(bits_);
  if (weights_.size() != (std::size_t{1} << bits_)) {
    throw DimensionError("baseline weight vector does not match 2^bits");
  }
  config_.bits = bits_;
}

Probability BaselineScorer::score(std::string_view text) const {
  return Probability(sigmoid(margin(hashed_features(text, bits_), weights_, bias_)));
}

std::string BaselineScorer::serialize() const {
  json nz = json::array();
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] != 0.0) nz.push_back(json::array({i, weights_[i]}));
  }
  json out;
  out["magic"] = kBaselineMagic;
  out["format_version"] = kBaselineFormat;
  out["bits"] = bits_;
  out["seed"] = config_.seed;
  out["epochs"] = config_.epochs;
  out["learning_rate"] = config_.learning_rate;
  out["l2"] = config_.l2;
  out["bias"] = bias_;
  out["weights"] = std::move(nz);
  return out.dump() + "\n";
}

BaselineScorer BaselineScorer::deserialize(std::string_view text) try {
  auto in = json::parse(text, nullptr, false);
  if (in.is_discarded() || !in.is_object() || in.value("magic", "") != kBaselineMagic) {
    throw FormatError(1, "not a baseline scorer file");
  }
  if (in.value("format_version", 0) != kBaselineFormat) {
    throw FormatError(1, "unsupported baseline format version");
  }
  BaselineConfig cfg;
  cfg.bits = in.at("bits").get<unsigned>();
  cfg.seed = in.at("seed").get<std::uint64_t>();
  cfg.epochs = in.at("epochs").get<std::size_t>();
  cfg.learning_rate = in.at("learning_rate").get<double>();
  cfg.l2 = in.at("l2").get<double>();
  check_bits(cfg.bits);
  const std::size_t dim = std::size_t{1} << cfg.bits;
  std::vector<double> w(dim, 0.0);
  for (const auto& e : in.at("weights")) {
    const auto idx = e.at(0).get<std::size_t>();
    if (idx >= dim) {
      throw DimensionError("baseline bucket index out of range");
    }
    w[idx] = e.at(1).get<double>();
  }
  return BaselineScorer(cfg.bits, std::move(w), in.at("bias").get<double>(), cfg);
} catch (const json::exception& e) {
  throw FormatError(1, std::string("malformed baseline scorer file: ") + e.what());
}

void BaselineScorer::save(const std::filesystem::path& path) const {
  write_file_atomic(path, serialize());
}

BaselineScorer BaselineScorer::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

BaselineScorer train_baseline(const Dataset& train, const BaselineConfig& config) {
  check_bits(config.bits);
  const auto labels = train.gold_labels();
  const auto positives = std::count(labels.begin(), labels.end(), Label::Suicide);
  if (positives == 0 || positives == static_cast<std::ptrdiff_t>(labels.size())) {
    throw DegenerateData("baseline training set '" + train.name() + "' lacks one of the classes");
  }
  std::vector<SparseDoc> docs;
  docs.reserve(train.size());
  for (const auto& p : train) docs.push_back(hashed_features(p.text, config.bits));

  const std::size_t dim = std::size_t{1} << config.bits;
  const double n = static_cast<double>(docs.size());
  std::vector<double> w(dim, 0.0), grad(dim, 0.0);
  double bias = 0.0;
  std::vector<double> history;
  history.reserve(config.epochs + 1);

  auto objective = [&] {
    double loss = 0.0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      loss += logistic_loss(margin(docs[i], w, bias), labels[i] == Label::Suicide ? 1.0 : -1.0);
    }
    const double sq = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
    return loss / n + 0.5 * config.l2 * sq;
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    history.push_back(objective());
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0.0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      const double y = labels[i] == Label::Suicide ? 1.0 : 0.0;
      const double r = sigmoid(margin(docs[i], w, bias)) - y;
      for (const auto& [b, v] : docs[i].entries) grad[b] += r * v;
      grad_bias += r;
    }
    for (std::size_t k = 0; k < dim; ++k) {
      if (grad[k] != 0.0 || w[k] != 0.0) {
        w[k] -= config.learning_rate * (grad[k] / n + config.l2 * w[k]);
      }
    }
    bias -= config.learning_rate * grad_bias / n;
  }
  history.push_back(objective());
  return BaselineScorer(config.bits, std::move(w), bias, config, std::move(history));
}

// ---------------------------------------------------------------------------
// Remote

Probability remote_score(std::string_view url, std::string_view text, const HttpOptions& options) {
  const auto endpoint = parse_endpoint(url, "/score");
  const std::string body = json{{"text", text}}.dump();
  const auto reply = with_retries(options.retry, [&] { return http_post_json(endpoint, body, options); });
  auto parsed = json::parse(reply, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    throw ProtocolError("scorer reply is not a JSON object");
  }
  auto it = parsed.find("prob_suicide");
  if (it == parsed.end() || !it->is_number()) {
    throw ProtocolError("scorer reply lacks numeric 'prob_suicide'");
  }
  const double p = it->get<double>();
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ProtocolError("scorer returned out-of-range probability " + it->dump());
  }
  return Probability(p);
}

RemoteScorer::RemoteScorer(std::string url, HttpOptions options)
    : url_(std::move(url)), options_(options) {
  parse_endpoint(url_, "/score");
}

Probability RemoteScorer::score(std::string_view text) const {
  return remote_score(url_, text, options_);
}

TableScorer::TableScorer(std::unordered_map<std::string, double> table, double fallback)
    : table_(std::move(table)), fallback_(fallback) {
  for (const auto& [text, p] : table_) {
    (void)Probability(p);
  }
}

Probability TableScorer::score(std::string_view text) const {
  if (auto it = table_.find(std::string(text)); it != table_.end()) {
    return Probability(it->second);
  }
  return fallback_;
}

}  // namespace riskcascade
