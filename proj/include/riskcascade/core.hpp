#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskcascade/errors.hpp"

namespace riskcascade {

/// Binary risk label. Suicide is the positive class everywhere.
enum class Label : std::uint8_t { NonSuicide = 0, Suicide = 1 };

std::string_view to_string(Label label) noexcept;

/// Accepts 0/1 and the strings "suicide"/"non_suicide" (case-insensitive).
std::optional<Label> parse_label(std::string_view text) noexcept;

inline Label label_from_bool(bool positive) noexcept {
  return positive ? Label::Suicide : Label::NonSuicide;
}

/// P(y = Suicide | x). Construction rejects NaN and values outside [0, 1].
class Probability {
public:
  Probability() = default;
  explicit Probability(double value);

  double value() const noexcept { return value_; }
  operator double() const noexcept { return value_; }

private:
  double value_ = 0.0;
};

struct Post {
  std::string id;
  std::string text;
  std::optional<Label> gold_label;
};

enum class Split : std::uint8_t { Train, Val, Test };

std::string_view to_string(Split split) noexcept;

/// Ordered, id-unique collection of posts. Immutable after construction.
class Dataset {
public:
  Dataset() = default;
  Dataset(std::string name, Split split, std::vector<Post> posts);

  const std::string& name() const noexcept { return name_; }
  Split split() const noexcept { return split_; }
  const std::vector<Post>& posts() const noexcept { return posts_; }
  std::size_t size() const noexcept { return posts_.size(); }
  bool empty() const noexcept { return posts_.empty(); }
  const Post& operator[](std::size_t i) const { return posts_[i]; }

  auto begin() const noexcept { return posts_.begin(); }
  auto end() const noexcept { return posts_.end(); }

  /// Gold labels in dataset order; throws PreconditionError if any is missing.
  std::vector<Label> gold_labels() const;

private:
  std::string name_;
  Split split_ = Split::Test;
  std::vector<Post> posts_;
};

enum class DatasetFormat : std::uint8_t { Jsonl, Csv };

/// Infers the format from the file extension (".csv" or anything else → jsonl).
DatasetFormat format_from_path(const std::filesystem::path& path);

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                     Split split = Split::Test, std::string name = {});

/// Writes one {"id","text","label"?} object per line.
void write_dataset_jsonl(const Dataset& ds, const std::filesystem::path& path);

/// Number of maximal whitespace-separated runs.
std::size_t token_length(std::string_view text) noexcept;

struct DatasetSplits {
  Dataset train;
  Dataset val;
  Dataset test;
};

/// Stratified 80/10/10 split driven by a seeded shuffle. Each class is
/// shuffled independently and cut at floor(0.8 n) / floor(0.9 n).
DatasetSplits split_dataset(const Dataset& ds, std::uint64_t seed);

}  // namespace riskcascade
