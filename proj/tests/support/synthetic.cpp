#include "synthetic.hpp"

#include <atomic>
#include <unistd.h>

#include "riskcascade/util.hpp"

namespace rctest {

using namespace riskcascade;

namespace {

constexpr const char* kExplicitPositive[] = {
    "I want to kill myself, I can't go on like this.",
    "I have decided to end my life. I bought pills tonight.",
    "There is no reason to live anymore and I feel worthless.",
    "I'm going to take my own life, everyone would be better off without me.",
    "I want to die. Nothing helps and the pain never stops.",
};
constexpr const char* kExplicitNegative[] = {
    "This exam is killing me but I'll survive.",
    "Had a great weekend hiking with friends.",
    "My cat knocked over my coffee again, classic.",
    "Work was long today, I'm dead tired but happy.",
    "Anyone have tips for learning guitar?",
};
constexpr const char* kImplicitPositive[] = {
    "Thank you for everything, I won't be around much longer. I'm just a burden.",
    "Please take care of my dog. This is my last message, I feel so empty.",
    "Goodbye to everyone who tried. I'm tired of everything and trapped.",
    "I gave away my things. Farewell, it is easier this way, I'm numb.",
    "See you on the other side. Everything hurts and I'm alone.",
};
constexpr const char* kImplicitNegative[] = {
    "I feel alone sometimes but my therapist is helping me.",
    "Exhausted after the move, but my friends were a great support.",
    "Feeling empty this week, going to talk to my counselor tomorrow.",
    "Honestly this commute is murder, I'm literally dying in traffic.",
    "Things are hard and I feel hopeless at times, but I'm getting better.",
};
constexpr const char* kFiller[] = {
    "today", "really", "just", "week", "anyway", "honestly", "lately", "again", "still",
    "maybe", "morning", "evening", "weather", "coffee", "music", "city", "train", "book",
};

std::string filler(Rng& rng, std::size_t index) {
  std::string s;
  const auto words = 2 + rng.index(5);
  for (std::size_t i = 0; i < words; ++i) {
    s += " ";
    s += kFiller[rng.index(std::size(kFiller))];
  }
  return s + " (" + std::to_string(index) + ")";
}

}  // namespace

Dataset synthetic_domain(Domain domain, std::size_t n, std::uint64_t seed, std::string name,
                         Split split) {
  Rng rng(seed);
  const bool expl = domain == Domain::Explicit;
  std::vector<Post> posts;
  for (std::size_t i = 0; i < n; ++i) {
    const bool positive = i % 2 == 0;
    const char* const* pool = expl ? (positive ? kExplicitPositive : kExplicitNegative)
                                   : (positive ? kImplicitPositive : kImplicitNegative);
    std::string text = std::string(pool[rng.index(5)]) + filler(rng, i);
    posts.push_back({name + "-" + std::to_string(i), std::move(text), label_from_bool(positive)});
  }
  return Dataset(std::move(name), split, std::move(posts));
}

Dataset merge(const Dataset& a, const Dataset& b, std::string name, Split split) {
  std::vector<Post> posts;
  for (const auto* ds : {&a, &b}) {
    for (const auto& p : *ds) posts.push_back({ds->name() + ":" + p.id, p.text, p.gold_label});
  }
  return Dataset(std::move(name), split, std::move(posts));
}

Dataset end_token_corpus(std::size_t n, std::uint64_t seed, std::string name) {
  constexpr const char* kWords[] = {"river", "lamp", "quiet", "paper", "green", "window",
                                    "stone", "cloud", "table", "orange", "letter", "field"};
  Rng rng(seed);
  std::vector<Post> posts;
  for (std::size_t i = 0; i < n; ++i) {
    const bool positive = rng.uniform() < 0.5;
    std::vector<std::string> words;
    const auto len = 4 + rng.index(6);
    for (std::size_t k = 0; k < len; ++k) words.emplace_back(kWords[rng.index(std::size(kWords))]);
    if (positive) words.insert(words.begin() + static_cast<long>(rng.index(words.size() + 1)), "end");
    std::string text;
    for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
    posts.push_back({"e" + std::to_string(i), text, label_from_bool(positive)});
  }
  return Dataset(std::move(name), Split::Train, std::move(posts));
}

FeatureCorpus separable_features(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  FeatureCorpus c;
  for (std::size_t i = 0; i < n; ++i) {
    const bool positive = rng.uniform() < 0.5;
    FeatureVector v;
    v[kSuicideIntent] = positive ? 1.0 : 0.0;
    v[positive ? kDistressHigh : kDistressLow] = 1.0;
    v[kReasoningLength] = static_cast<double>(40 + rng.index(120));
    c.X.push_back(v);
    c.y.push_back(label_from_bool(positive));
  }
  return c;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("riskcascade-" + tag + "-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace rctest
