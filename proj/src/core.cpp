#include "riskcascade/core.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_set>

#include "riskcascade/util.hpp"

namespace riskcascade {

using nlohmann::json;

std::string_view to_string(Label label) noexcept {
  return label == Label::Suicide ? "suicide" : "non_suicide";
}

std::optional<Label> parse_label(std::string_view text) noexcept {
  const auto t = to_lower_ascii(trim(text));
  if (t == "1" || t == "suicide") {
    return Label::Suicide;
  }
  if (t == "0" || t == "non_suicide") {
    return Label::NonSuicide;
  }
  return std::nullopt;
}

Probability::Probability(double value) : value_(value) {
  if (std::isnan(value) || value < 0.0 || value > 1.0) {
    throw PreconditionError("probability out of range: " + std::to_string(value));
  }
}

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "test";
}

Dataset::Dataset(std::string name, Split split, std::vector<Post> posts)
    : name_(std::move(name)), split_(split), posts_(std::move(posts)) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(posts_.size());
  for (const auto& p : posts_) {
    if (trim(p.text).empty()) {
      throw PreconditionError("post '" + p.id + "' has empty text");
    }
    if (!seen.insert(p.id).second) {
      throw PreconditionError("duplicate post id '" + p.id + "' in dataset " + name_);
    }
  }
}

std::vector<Label> Dataset::gold_labels() const {
  std::vector<Label> out;
  out.reserve(posts_.size());
  for (const auto& p : posts_) {
    if (!p.gold_label) {
      throw PreconditionError("post '" + p.id + "' in " + name_ + " has no gold label");
    }
    out.push_back(*p.gold_label);
  }
  return out;
}

DatasetFormat format_from_path(const std::filesystem::path& path) {
  return to_lower_ascii(path.extension().string()) == ".csv" ? DatasetFormat::Csv
                                                             : DatasetFormat::Jsonl;
}

namespace {

std::optional<Label> label_from_json(const json& v, std::size_t row) {
  if (v.is_null()) {
    return std::nullopt;
  }
  if (v.is_number_integer() || v.is_number_unsigned()) {
    const auto n = v.get<long long>();
    if (n == 0 || n == 1) {
      return label_from_bool(n == 1);
    }
  } else if (v.is_string()) {
    if (auto l = parse_label(v.get<std::string>())) {
      return l;
    }
  }
  throw FormatError(row, "unrecognised label " + v.dump());
}

Post post_from_json(const json& obj, std::size_t row) {
  if (!obj.is_object()) {
    throw FormatError(row, "record is not a JSON object");
  }
  auto id = obj.find("id");
  if (id == obj.end()) {
    throw FormatError(row, "missing 'id'");
  }
  auto text = obj.find("text");
  if (text == obj.end() || !text->is_string()) {
    throw FormatError(row, "missing or non-string 'text'");
  }
  Post p;
  if (id->is_string()) {
    p.id = id->get<std::string>();
  } else if (id->is_number_integer() || id->is_number_unsigned()) {
    p.id = id->dump();
  } else {
    throw FormatError(row, "'id' must be a string or integer");
  }
  p.text = text->get<std::string>();
  if (trim(p.text).empty()) {
    throw FormatError(row, "'text' is empty");
  }
  if (auto label = obj.find("label"); label != obj.end()) {
    p.gold_label = label_from_json(*label, row);
  }
  return p;
}

std::vector<Post> read_jsonl(std::istream& in) {
  std::vector<Post> posts;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) {
      continue;
    }
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(row, std::string("invalid JSON: ") + e.what());
    }
    posts.push_back(post_from_json(obj, row));
  }
  return posts;
}

// RFC 4180: quoted fields may contain commas, doubled quotes and newlines.
// Returns false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
  fields.clear();
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') {
          ++line;
        }
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++line;
      if (!field.empty() && field.back() == '\r') {
        field.pop_back();
      }
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) {
    throw FormatError(line, "unterminated quoted field");
  }
  if (!any) {
    return false;
  }
  if (!field.empty() && field.back() == '\r') {
    field.pop_back();
  }
  fields.push_back(std::move(field));
  return true;
}

std::vector<Post> read_csv(std::istream& in) {
  std::vector<Post> posts;
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!read_csv_record(in, fields, line)) {
    return posts;
  }
  std::ptrdiff_t id_col = -1, text_col = -1, label_col = -1;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto name = to_lower_ascii(trim(fields[i]));
    if (name == "id") id_col = static_cast<std::ptrdiff_t>(i);
    else if (name == "text") text_col = static_cast<std::ptrdiff_t>(i);
    else if (name == "label") label_col = static_cast<std::ptrdiff_t>(i);
  }
  if (id_col < 0 || text_col < 0) {
    throw FormatError(1, "CSV header must contain 'id' and 'text'");
  }
  std::size_t row = 1;  // header is row 1; data rows count from 2
  while (true) {
    if (!read_csv_record(in, fields, line)) {
      break;
    }
    ++row;
    if (fields.size() == 1 && trim(fields[0]).empty()) {
      continue;
    }
    auto get = [&](std::ptrdiff_t col) -> const std::string* {
      return col >= 0 && static_cast<std::size_t>(col) < fields.size()
                 ? &fields[static_cast<std::size_t>(col)]
                 : nullptr;
    };
    Post p;
    const auto* id = get(id_col);
    const auto* text = get(text_col);
    if (id == nullptr || trim(*id).empty()) {
      throw FormatError(row, "missing 'id'");
    }
    if (text == nullptr || trim(*text).empty()) {
      throw FormatError(row, "missing 'text'");
    }
    p.id = *id;
    p.text = *text;
    if (const auto* label = get(label_col); label != nullptr && !trim(*label).empty()) {
      p.gold_label = parse_label(*label);
      if (!p.gold_label) {
        throw FormatError(row, "unrecognised label '" + *label + "'");
      }
    }
    posts.push_back(std::move(p));
  }
  return posts;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format, Split split,
                     std::string name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read dataset " + path.string());
  }
  auto posts = format == DatasetFormat::Csv ? read_csv(in) : read_jsonl(in);
  if (name.empty()) {
    name = path.stem().string();
  }
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    if (!ids.insert(posts[i].id).second) {
      throw FormatError(i + 1, "duplicate id '" + posts[i].id + "'");
    }
  }
  return Dataset(std::move(name), split, std::move(posts));
}

void write_dataset_jsonl(const Dataset& ds, const std::filesystem::path& path) {
  std::string out;
  for (const auto& p : ds) {
    json obj = {{"id", p.id}, {"text", p.text}};
    if (p.gold_label) {
      obj["label"] = *p.gold_label == Label::Suicide ? 1 : 0;
    }
    out += obj.dump();
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::size_t token_length(std::string_view text) noexcept {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_token) {
      ++count;
    }
    in_token = !space;
  }
  return count;
}

DatasetSplits split_dataset(const Dataset& ds, std::uint64_t seed) {
  std::vector<std::size_t> pos, neg, unlabeled;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& l = ds[i].gold_label;
    (!l ? unlabeled : *l == Label::Suicide ? pos : neg).push_back(i);
  }
  Rng rng(seed);
  std::vector<std::size_t> train, val, test;
  for (auto* group : {&pos, &neg, &unlabeled}) {
    rng.shuffle(*group);
    const std::size_t n = group->size();
    const std::size_t cut_train = n * 8 / 10;
    const std::size_t cut_val = n * 9 / 10;
    for (std::size_t k = 0; k < n; ++k) {
      (k < cut_train ? train : k < cut_val ? val : test).push_back((*group)[k]);
    }
  }
  auto materialise = [&](std::vector<std::size_t>& idx, Split split) {
    std::sort(idx.begin(), idx.end());
    std::vector<Post> posts;
    posts.reserve(idx.size());
    for (auto i : idx) {
      posts.push_back(ds[i]);
    }
    return Dataset(ds.name() + "_" + std::string(to_string(split)), split, std::move(posts));
  };
  return {materialise(train, Split::Train), materialise(val, Split::Val),
          materialise(test, Split::Test)};
}

}  // namespace riskcascade
