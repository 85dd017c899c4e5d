#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "riskcascade/errors.hpp"

namespace riskcascade {

/// System + user message pair sent to a chat model.
struct PromptPair {
  std::string system;
  std::string user;
};

/// Anything that can answer a two-message chat request with text.
/// Implementations must be safe for concurrent calls.
class ChatClient {
public:
  virtual ~ChatClient() = default;
  /// Throws TransportError / ProtocolError on failure.
  virtual std::string chat(const PromptPair& prompt) = 0;
};

struct RetryPolicy {
  std::size_t max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  double multiplier = 2.0;
};

/// Calls fn up to policy.max_attempts times, sleeping with exponential backoff
/// after each TransportError. Other errors propagate immediately.
template <typename Fn>
auto with_retries(const RetryPolicy& policy, Fn&& fn) -> decltype(fn());

struct Endpoint {
  std::string scheme_host_port;  // e.g. "http://127.0.0.1:8080"
  std::string path;              // e.g. "/chat"
};

/// Splits a URL into its origin and path; `default_path` is used when the URL
/// carries none. Throws PreconditionError on anything but http(s) URLs.
Endpoint parse_endpoint(std::string_view url, std::string_view default_path);

/// Name of the environment variable holding an optional bearer token.
inline constexpr const char* kCredentialEnv = "RISKCASCADE_API_KEY";

struct HttpOptions {
  RetryPolicy retry;
  std::chrono::milliseconds connect_timeout{5000};
  std::chrono::milliseconds read_timeout{60000};
};

/// POSTs a JSON body and returns the parsed JSON reply as a string. Non-2xx
/// statuses and connection failures raise TransportError; a body that is
/// not JSON raises ProtocolError. No retries at this level.
std::string http_post_json(const Endpoint& endpoint, const std::string& body,
                           const HttpOptions& options);

/// Chat service: POST {"system","user"} → {"content"}.
class HttpChatClient final : public ChatClient {
public:
  HttpChatClient(std::string_view url, HttpOptions options = {});
  std::string chat(const PromptPair& prompt) override;

private:
  Endpoint endpoint_;
  HttpOptions options_;
};

/// Test double: answers through a user-supplied function and counts calls.
class FunctionChatClient final : public ChatClient {
public:
  using Responder = std::function<std::string(const PromptPair&)>;
  explicit FunctionChatClient(Responder responder) : responder_(std::move(responder)) {}

  std::string chat(const PromptPair& prompt) override {
    ++calls_;
    return responder_(prompt);
  }
  std::size_t calls() const noexcept { return calls_.load(); }

private:
  Responder responder_;
  std::atomic<std::size_t> calls_{0};
};

// ---------------------------------------------------------------------------

template <typename Fn>
auto with_retries(const RetryPolicy& policy, Fn&& fn) -> decltype(fn()) {
  auto backoff = policy.initial_backoff;
  const std::size_t attempts = policy.max_attempts == 0 ? 1 : policy.max_attempts;
  for (std::size_t attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const TransportError&) {
      if (attempt >= attempts) throw;
    }
    std::this_thread::sleep_for(backoff);
    backoff = std::chrono::milliseconds(
        static_cast<long long>(static_cast<double>(backoff.count()) * policy.multiplier));
  }
}

}  // namespace riskcascade
