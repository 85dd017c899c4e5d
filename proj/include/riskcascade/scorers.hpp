#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "riskcascade/client.hpp"
#include "riskcascade/core.hpp"

namespace riskcascade {

/// Stage-1 role: maps a post's text to P(Suicide | text). Deterministic per
/// instance; implementations must be safe to call concurrently.
class Scorer {
public:
  virtual ~Scorer() = default;
  virtual Probability score(std::string_view text) const = 0;
};

// ---------------------------------------------------------------------------
// Persona agents

enum class AgentPersona : std::uint8_t { Bullish, Bearish, Expert };

std::string_view to_string(AgentPersona persona) noexcept;
std::optional<AgentPersona> parse_persona(std::string_view name) noexcept;

/// The bundled system prompt for a persona.
std::string_view persona_system_prompt(AgentPersona persona) noexcept;

class Verdict {
public:
  enum class Kind : std::uint8_t { Suicide, NonSuicide, Abstain };

  static Verdict suicide() { return Verdict(Kind::Suicide, {}); }
  static Verdict non_suicide() { return Verdict(Kind::NonSuicide, {}); }
  static Verdict abstain(std::string reason) { return Verdict(Kind::Abstain, std::move(reason)); }
  static Verdict of(Label label) {
    return label == Label::Suicide ? suicide() : non_suicide();
  }

  Kind kind() const noexcept { return kind_; }
  bool is_abstain() const noexcept { return kind_ == Kind::Abstain; }
  /// Empty for abstentions.
  std::optional<Label> label() const noexcept;
  /// Why the agent abstained (transport error text or the raw reply).
  const std::string& reason() const noexcept { return reason_; }

  bool operator==(const Verdict& other) const noexcept { return kind_ == other.kind_; }

private:
  Verdict(Kind kind, std::string reason) : kind_(kind), reason_(std::move(reason)) {}
  Kind kind_;
  std::string reason_;
};

std::string_view to_string(Verdict::Kind kind) noexcept;

/// Scans for the last line of the form `Label: suicide` / `Label: [non_suicide]`
/// (case-insensitive, brackets and whitespace tolerated). Anything else is an
/// abstention carrying the raw reply.
Verdict parse_agent_reply(std::string_view reply) noexcept;

/// Never throws: transport and protocol failures become abstentions.
Verdict agent_classify(ChatClient& client, AgentPersona persona, std::string_view text) noexcept;

// ---------------------------------------------------------------------------
// Hashed bag-of-words logistic baseline

struct BaselineConfig {
  std::size_t epochs = 100;
  double learning_rate = 1.0;
  double l2 = 1e-6;
  unsigned bits = 18;
  std::uint64_t seed = 0;
};

/// Lower-cased alphanumeric runs of `text`.
std::vector<std::string> baseline_tokens(std::string_view text);

/// Logistic regression over 2^bits hashed unigram buckets. Each document is
/// the L2-normalised count vector of its tokens; the bias is unregularised.
class BaselineScorer final : public Scorer {
public:
  BaselineScorer(unsigned bits, std::vector<double> weights, double bias, BaselineConfig config,
                 std::vector<double> training_loss = {});

  Probability score(std::string_view text) const override;

  unsigned bits() const noexcept { return bits_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  const BaselineConfig& config() const noexcept { return config_; }
  /// Average regularised training loss before each epoch and after the last.
  const std::vector<double>& training_loss() const noexcept { return training_loss_; }

  /// JSON dump with a magic header; only non-zero buckets are stored.
  std::string serialize() const;
  static BaselineScorer deserialize(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static BaselineScorer load(const std::filesystem::path& path);

private:
  unsigned bits_;
  std::vector<double> weights_;
  double bias_;
  BaselineConfig config_;
  std::vector<double> training_loss_;
};

/// Full-batch gradient descent on the average logistic loss. Throws
/// DegenerateData unless both labels are present.
BaselineScorer train_baseline(const Dataset& train, const BaselineConfig& config = {});

// ---------------------------------------------------------------------------
// Remote scorer

/// POST {"text"} → {"prob_suicide"}; retries transport failures per options.
Probability remote_score(std::string_view url, std::string_view text,
                         const HttpOptions& options = {});

class RemoteScorer final : public Scorer {
public:
  explicit RemoteScorer(std::string url, HttpOptions options = {});
  Probability score(std::string_view text) const override;

private:
  std::string url_;
  HttpOptions options_;
};

// ---------------------------------------------------------------------------
// Deterministic doubles

class FixedScorer final : public Scorer {
public:
  explicit FixedScorer(double p) : p_(p) {}
  Probability score(std::string_view) const override { return p_; }

private:
  Probability p_;
};

/// Looks the text up in a table; unknown texts get `fallback`.
class TableScorer final : public Scorer {
public:
  TableScorer(std::unordered_map<std::string, double> table, double fallback = 0.5);
  Probability score(std::string_view text) const override;

private:
  std::unordered_map<std::string, double> table_;
  Probability fallback_;
};

/// Forwards to another scorer and counts invocations.
class CountingScorer final : public Scorer {
public:
  explicit CountingScorer(const Scorer& inner) : inner_(inner) {}
  Probability score(std::string_view text) const override {
    ++calls_;
    return inner_.score(text);
  }
  std::size_t calls() const noexcept { return calls_.load(); }

private:
  const Scorer& inner_;
  mutable std::atomic<std::size_t> calls_{0};
};

}  // namespace riskcascade
