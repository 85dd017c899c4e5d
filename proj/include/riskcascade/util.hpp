#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace riskcascade {

/// Seeded generator with platform-independent draws. The std:: distributions
/// are implementation-defined, so everything that must reproduce across
/// toolchains goes through these helpers.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    // Lemire's multiply-shift with rejection.
    __extension__ using u128 = unsigned __int128;
    const auto range = static_cast<std::uint64_t>(n);
    auto m = static_cast<u128>(engine_()) * range;
    auto low = static_cast<std::uint64_t>(m);
    if (low < range) {
      const std::uint64_t threshold = (0 - range) % range;
      while (low < threshold) {
        m = static_cast<u128>(engine_()) * range;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::size_t>(m >> 64);
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

private:
  std::mt19937_64 engine_;
};

/// Runs fn(i) for i in [0, n) on at most `workers` threads. Exceptions are
/// captured per index; the caller decides what to do with them.
std::vector<std::exception_ptr> parallel_for(std::size_t n, std::size_t workers,
                                             const std::function<void(std::size_t)>& fn);

/// Write-temp-then-rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Lower-case hex SHA-256 of the input bytes.
std::string sha256_hex(std::string_view bytes);

std::string to_lower_ascii(std::string_view text);

std::string_view trim(std::string_view text) noexcept;

inline double sigmoid(double z) {
  if (z >= 0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace riskcascade
