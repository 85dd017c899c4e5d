#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "riskcascade/analysis.hpp"
#include "riskcascade/core.hpp"

namespace rctest {

enum class Domain { Explicit, Implicit };

/// Balanced labelled posts built from fixed templates plus seeded filler.
/// Explicit positives state intent outright; implicit positives only carry
/// farewell and distress cues. Texts are unique.
riskcascade::Dataset synthetic_domain(Domain domain, std::size_t n, std::uint64_t seed,
                                      std::string name,
                                      riskcascade::Split split = riskcascade::Split::Test);

/// Union of two datasets with ids prefixed by their source name.
riskcascade::Dataset merge(const riskcascade::Dataset& a, const riskcascade::Dataset& b,
                           std::string name, riskcascade::Split split);

/// Posts where the token "end" appears exactly in the positives.
riskcascade::Dataset end_token_corpus(std::size_t n, std::uint64_t seed, std::string name);

/// Linearly separable feature rows: positives have intent and high distress,
/// negatives are all-zero with low distress. Reasoning lengths are random.
struct FeatureCorpus {
  riskcascade::FeatureMatrix X;
  std::vector<riskcascade::Label> y;
};
FeatureCorpus separable_features(std::size_t n, std::uint64_t seed);

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

}  // namespace rctest
