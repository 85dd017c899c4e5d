#include "riskcascade/client.hpp"

#include <cstdlib>
#include <nlohmann/json.hpp>

#include "httplib.h"

namespace riskcascade {

using nlohmann::json;

Endpoint parse_endpoint(std::string_view url, std::string_view default_path) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw PreconditionError("endpoint must be an http(s) URL: " + std::string(url));
  }
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw PreconditionError("unsupported scheme in endpoint: " + std::string(url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint ep;
  if (path_start == std::string_view::npos) {
    ep.scheme_host_port = std::string(url);
    ep.path = std::string(default_path);
  } else {
    ep.scheme_host_port = std::string(url.substr(0, path_start));
    ep.path = std::string(url.substr(path_start));
    if (ep.path == "/") {
      ep.path = std::string(default_path);
    }
  }
  if (ep.scheme_host_port.size() == scheme_end + 3) {
    throw PreconditionError("endpoint has no host: " + std::string(url));
  }
  return ep;
}

std::string http_post_json(const Endpoint& endpoint, const std::string& body,
                           const HttpOptions& options) {
  httplib::Client client(endpoint.scheme_host_port);
  client.set_connection_timeout(options.connect_timeout);
  client.set_read_timeout(options.read_timeout);
  client.set_write_timeout(options.read_timeout);
  httplib::Headers headers;
  if (const char* key = std::getenv(kCredentialEnv); key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  auto res = client.Post(endpoint.path, headers, body, "application/json");
  if (!res) {
    throw TransportError("POST " + endpoint.scheme_host_port + endpoint.path + " failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("POST " + endpoint.scheme_host_port + endpoint.path + " returned HTTP " +
                         std::to_string(res->status));
  }
  return res->body;
}

HttpChatClient::HttpChatClient(std::string_view url, HttpOptions options)
    : endpoint_(parse_endpoint(url, "/chat")), options_(options) {}

std::string HttpChatClient::chat(const PromptPair& prompt) {
  const std::string body = json{{"system", prompt.system}, {"user", prompt.user}}.dump();
  return with_retries(options_.retry, [&] {
    const auto reply = http_post_json(endpoint_, body, options_);
    json parsed;
    try {
      parsed = json::parse(reply);
    } catch (const json::parse_error&) {
      throw ProtocolError("chat reply is not JSON");
    }
    auto content = parsed.find("content");
    if (!parsed.is_object() || content == parsed.end() || !content->is_string()) {
      throw ProtocolError("chat reply lacks a string 'content' field");
    }
    return content->get<std::string>();
  });
}

}  // namespace riskcascade
