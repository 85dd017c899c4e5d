#pragma once

#include <atomic>
#include <cstddef>
#include <string>
#include <string_view>

#include "riskcascade/client.hpp"
#include "riskcascade/scorers.hpp"

// Offline stand-ins for the hosted analyst and persona agents. They answer
// in exactly the wire formats the real services use, so every parsing path
// is exercised without network access.

namespace riskcascade {

/// The analyst's reply for the worked example in its own prompt.
std::string_view prompt_example_reply() noexcept;

/// Derives the six indicators from keyword cues and answers with a JSON
/// object in the analyst's format.
std::string keyword_analyst_reply(std::string_view text);

/// Keyword cue scoring with a persona-dependent decision rule, answered as
/// "Label: suicide" / "Label: non_suicide". Bullish flags any distress cue,
/// bearish needs intent or farewell plus distress, expert defers to coping cues.
std::string keyword_agent_reply(AgentPersona persona, std::string_view text);

/// Serves both stand-ins, dispatching on the system prompt. Safe for
/// concurrent use.
class KeywordChatClient final : public ChatClient {
public:
  std::string chat(const PromptPair& prompt) override;
  std::size_t calls() const noexcept { return calls_.load(); }

private:
  std::atomic<std::size_t> calls_{0};
};

}  // namespace riskcascade
