#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "riskcascade/client.hpp"
#include "riskcascade/core.hpp"

namespace riskcascade {

enum class DistressLevel : std::uint8_t { Low, Medium, High, Unknown };

std::string_view to_string(DistressLevel level) noexcept;

/// The six indicators returned by the psychological-analyst prompt.
struct FundamentalAnalysis {
  bool suicide_intent = false;
  DistressLevel emotional_distress_level = DistressLevel::Unknown;
  bool has_plan = false;
  bool is_metaphor = false;
  bool farewell_hint = false;
  std::string reasoning;

  bool operator==(const FundamentalAnalysis&) const = default;
};

inline constexpr std::size_t kFeatureDim = 9;

/// Slot layout of FeatureVector::values.
enum FeatureSlot : std::size_t {
  kSuicideIntent = 0,
  kDistressLow = 1,
  kDistressMedium = 2,
  kDistressHigh = 3,
  kDistressUnknown = 4,
  kHasPlan = 5,
  kIsMetaphor = 6,
  kFarewellHint = 7,
  kReasoningLength = 8,
};

const std::array<std::string_view, kFeatureDim>& feature_names() noexcept;

struct FeatureVector {
  std::array<double, kFeatureDim> values{};

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  bool operator==(const FeatureVector&) const = default;
};

using FeatureMatrix = std::vector<FeatureVector>;

/// Binary slots are 0/1, the distress group is one-hot and the reasoning
/// length is a non-negative integer.
bool is_valid_feature_vector(const FeatureVector& v) noexcept;

/// Bumped whenever the analyst prompt changes; cache entries from other
/// versions are ignored.
inline constexpr std::string_view kAnalystPromptVersion = "analyst-v1";

/// The bundled analyst system prompt.
std::string_view analyst_system_prompt() noexcept;

/// Precondition: text is non-empty.
PromptPair build_analyst_prompt(std::string_view text);

/// Parses untrusted model output. Surrounding prose is tolerated; the first
/// balanced top-level JSON object is used. Throws ParseError / SchemaError.
FundamentalAnalysis parse_analysis(std::string_view raw);

/// Compact JSON with the six fields, as the analyst would emit it.
std::string serialize_analysis(const FundamentalAnalysis& a);

FeatureVector vectorize(const FundamentalAnalysis& a);

/// Content-addressed store of analyses, optionally persisted as jsonl
/// ({"key", "prompt_version", "analysis"} per line). Concurrent lookups are
/// allowed; inserts are serialized and appended to the backing file.
class FeatureCache {
public:
  /// In-memory only.
  FeatureCache() = default;
  /// Loads `path` if it exists and appends new entries to it.
  explicit FeatureCache(std::filesystem::path path);

  FeatureCache(const FeatureCache&) = delete;
  FeatureCache& operator=(const FeatureCache&) = delete;

  static std::string key_for(std::string_view text);

  std::optional<FundamentalAnalysis> lookup(std::string_view text) const;
  void insert(std::string_view text, const FundamentalAnalysis& analysis);
  std::size_t size() const;

private:
  std::optional<std::filesystem::path> path_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, FundamentalAnalysis> entries_;
};

struct ExtractOptions {
  std::size_t parallelism = 1;
  /// Attempts per post when the reply does not parse; transport retries are
  /// the client's business.
  std::size_t max_attempts = 3;
};

/// Raised by extract_features; lists every post that could not be analysed.
class ExtractionError : public AnalystError {
public:
  ExtractionError(std::vector<std::string> ids, const std::string& first_cause)
      : AnalystError(ids.empty() ? std::string() : ids.front(),
                     first_cause + " (" + std::to_string(ids.size()) + " post(s) failed)"),
        failed_ids_(std::move(ids)) {}
  const std::vector<std::string>& failed_ids() const noexcept { return failed_ids_; }

private:
  std::vector<std::string> failed_ids_;
};

/// Cache-first analysis of one post. Throws AnalystError.
FundamentalAnalysis analyze_post(const Post& post, ChatClient& analyst, FeatureCache& cache,
                                 std::size_t max_attempts = 3);

/// Vectorizes every post of `ds` in dataset order. All-or-nothing: any
/// failure raises ExtractionError and no matrix is returned.
FeatureMatrix extract_features(const Dataset& ds, ChatClient& analyst, FeatureCache& cache,
                               const ExtractOptions& options = {});

/// Matrix file: one {"id", "features": [9 floats]} object per line.
void write_feature_matrix(const std::filesystem::path& path, const Dataset& ds,
                          const FeatureMatrix& matrix);
/// Reads a matrix file and checks that its ids match `ds` row by row.
FeatureMatrix read_feature_matrix(const std::filesystem::path& path, const Dataset& ds);

}  // namespace riskcascade
