#include "riskcascade/mocks.hpp"

#include <initializer_list>

#include "riskcascade/analysis.hpp"
#include "riskcascade/util.hpp"

namespace riskcascade {

std::string_view prompt_example_reply() noexcept {
  return R"({
  "suicide_intent": false,
  "emotional_distress_level": "low",
  "has_plan": false,
  "is_metaphor": true,
  "farewell_hint": false,
  "reasoning": "The user uses hyperbole about homework, not genuine ideation."
})";
}

namespace {

struct Cues {
  int intent = 0;
  int plan = 0;
  int metaphor = 0;
  int farewell = 0;
  int distress = 0;
  int coping = 0;
};

int count_any(std::string_view haystack, std::initializer_list<std::string_view> needles) {
  int n = 0;
  for (auto needle : needles) {
    n += haystack.find(needle) != std::string_view::npos ? 1 : 0;
  }
  return n;
}

Cues read_cues(std::string_view text) {
  const auto t = to_lower_ascii(text);
  Cues c;
  c.intent = count_any(t, {"kill myself", "end my life", "suicide", "want to die", "end it all",
                           "better off without me", "don't want to live", "no reason to live",
                           "take my own life"});
  c.plan = count_any(t, {"pills", "rope", "bridge", "tonight", "my plan", "gun", "wrote a note",
                         "method"});
  c.metaphor = count_any(t, {"killing me", "dying of", "dead tired", "literally dying",
                             "could die of", "murder"});
  c.farewell = count_any(t, {"goodbye", "farewell", "thank you for everything", "take care of my",
                             "last message", "won't be around", "see you on the other side"});
  c.distress = count_any(t, {"hopeless", "worthless", "alone", "empty", "pain", "trapped",
                             "exhausted", "numb", "burden", "can't go on", "tired of everything"});
  c.coping = count_any(t, {"friends", "therapy", "therapist", "counselor", "getting better",
                           "helping me", "support"});
  return c;
}

}  // namespace

std::string keyword_analyst_reply(std::string_view text) {
  const auto c = read_cues(text);
  FundamentalAnalysis a;
  a.suicide_intent = c.intent > 0;
  a.is_metaphor = c.metaphor > 0 && c.intent == 0;
  a.has_plan = c.plan > 0 && (c.intent > 0 || c.farewell > 0);
  a.farewell_hint = c.farewell > 0;
  const int severity = c.distress + 2 * c.intent + c.farewell;
  a.emotional_distress_level = severity >= 3   ? DistressLevel::High
                               : severity >= 1 ? DistressLevel::Medium
                                               : DistressLevel::Low;
  a.reasoning = "Cues: intent " + std::to_string(c.intent) + ", plan " + std::to_string(c.plan) +
                ", metaphor " + std::to_string(c.metaphor) + ", farewell " +
                std::to_string(c.farewell) + ", distress " + std::to_string(c.distress) + ".";
  return serialize_analysis(a);
}

std::string keyword_agent_reply(AgentPersona persona, std::string_view text) {
  const auto c = read_cues(text);
  bool positive = false;
  switch (persona) {
    case AgentPersona::Bullish:
      positive = c.intent + c.plan + c.farewell + c.distress > 0;
      break;
    case AgentPersona::Bearish:
      positive = c.intent > 0 || (c.farewell > 0 && c.distress > 0);
      break;
    case AgentPersona::Expert: {
      const int score = 2 * c.intent + c.plan + c.farewell + c.distress;
      positive = (c.coping == 0 || c.intent > 0) && score >= 2;
      break;
    }
  }
  return std::string("Assessment complete.\nLabel: ") + (positive ? "suicide" : "non_suicide");
}

std::string KeywordChatClient::chat(const PromptPair& prompt) {
  ++calls_;
  if (prompt.system == analyst_system_prompt()) {
    return keyword_analyst_reply(prompt.user);
  }
  for (auto persona : {AgentPersona::Bullish, AgentPersona::Bearish, AgentPersona::Expert}) {
    if (prompt.system == persona_system_prompt(persona)) {
      return keyword_agent_reply(persona, prompt.user);
    }
  }
  throw ProtocolError("keyword stand-in does not recognise the system prompt");
}

}  // namespace riskcascade
