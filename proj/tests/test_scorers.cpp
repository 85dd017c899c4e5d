#include "doctest.h"

#include <cstdlib>
#include <nlohmann/json.hpp>

#include "riskcascade/mocks.hpp"
#include "riskcascade/scorers.hpp"
#include "riskcascade/util.hpp"
#include "support/mock_server.hpp"
#include "support/synthetic.hpp"

using namespace riskcascade;
using nlohmann::json;

namespace {

HttpOptions fast_options(std::size_t attempts = 3) {
  HttpOptions o;
  o.retry = {attempts, std::chrono::milliseconds(1), 2.0};
  o.connect_timeout = std::chrono::milliseconds(500);
  o.read_timeout = std::chrono::milliseconds(2000);
  return o;
}

double accuracy(const Scorer& s, const Dataset& ds) {
  std::size_t ok = 0;
  for (const auto& p : ds) ok += label_from_bool(s.score(p.text) >= 0.5) == p.gold_label;
  return static_cast<double>(ok) / static_cast<double>(ds.size());
}

}  // namespace

TEST_CASE("persona prompts are bundled and distinct") {
  const auto bull = persona_system_prompt(AgentPersona::Bullish);
  const auto bear = persona_system_prompt(AgentPersona::Bearish);
  const auto expert = persona_system_prompt(AgentPersona::Expert);
  CHECK(bear.find("You are a conservative mental health professional") == 0);
  for (auto p : {bull, bear, expert}) CHECK(p.find("Label:") != std::string_view::npos);
  CHECK(bull != bear);
  CHECK(bear != expert);
  CHECK(parse_persona("Expert") == AgentPersona::Expert);
  CHECK_FALSE(parse_persona("neutral").has_value());
}

TEST_CASE("agent replies map to verdicts") {
  CHECK(parse_agent_reply("Label: suicide").kind() == Verdict::Kind::Suicide);
  CHECK(parse_agent_reply("Label: [non_suicide]").kind() == Verdict::Kind::NonSuicide);
  CHECK(parse_agent_reply("I think this person needs help").is_abstain());
  CHECK(parse_agent_reply("I think this person needs help").reason() ==
        "I think this person needs help");

  CHECK(parse_agent_reply("Reasoning...\n**label**:  SUICIDE.  \n").kind() ==
        Verdict::Kind::Suicide);
  CHECK(parse_agent_reply("Label: suicide\nOn reflection:\nLabel: non_suicide").kind() ==
        Verdict::Kind::NonSuicide);
  CHECK(parse_agent_reply("Label: [suicide/non_suicide]").is_abstain());
  CHECK(parse_agent_reply("Label: suicidal").is_abstain());
  CHECK(parse_agent_reply("").is_abstain());
}

TEST_CASE("agent_classify never throws") {
  FunctionChatClient failing([](const PromptPair&) -> std::string { throw TransportError("x"); });
  CHECK(agent_classify(failing, AgentPersona::Expert, "text").is_abstain());
  FunctionChatClient weird([](const PromptPair&) -> std::string { throw 42; });
  CHECK(agent_classify(weird, AgentPersona::Expert, "text").is_abstain());

  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    std::string reply;
    for (std::size_t k = 0, n = rng.index(40); k < n; ++k) {
      reply += static_cast<char>(rng.index(256));
    }
    if (i % 3 == 0) reply += "\nLabel: ";
    FunctionChatClient c([&](const PromptPair&) { return reply; });
    CHECK_NOTHROW(agent_classify(c, AgentPersona::Bullish, "text"));
  }
}

TEST_CASE("agents receive their persona prompt and the raw text") {
  PromptPair seen;
  FunctionChatClient c([&](const PromptPair& p) {
    seen = p;
    return std::string("Label: non_suicide");
  });
  CHECK(agent_classify(c, AgentPersona::Bearish, "raw \"text\"").kind() ==
        Verdict::Kind::NonSuicide);
  CHECK(seen.system == persona_system_prompt(AgentPersona::Bearish));
  CHECK(seen.user == "raw \"text\"");
}

TEST_CASE("keyword agents follow their persona rules") {
  KeywordChatClient c;
  const std::string explicit_post = "I want to kill myself tonight.";
  const std::string coping = "I feel alone but my therapist is helping me.";
  for (auto p : {AgentPersona::Bullish, AgentPersona::Bearish, AgentPersona::Expert}) {
    CHECK(agent_classify(c, p, explicit_post).kind() == Verdict::Kind::Suicide);
  }
  CHECK(agent_classify(c, AgentPersona::Bullish, coping).kind() == Verdict::Kind::Suicide);
  CHECK(agent_classify(c, AgentPersona::Bearish, coping).kind() == Verdict::Kind::NonSuicide);
  CHECK(agent_classify(c, AgentPersona::Expert, coping).kind() == Verdict::Kind::NonSuicide);
}

TEST_CASE("baseline learns a marker token") {
  const auto corpus = rctest::end_token_corpus(200, 17, "end");
  const auto parts = split_dataset(corpus, 17);
  BaselineConfig cfg;
  cfg.seed = 1;
  const auto s = train_baseline(parts.train, cfg);
  CHECK(accuracy(s, parts.test) >= 0.95);
  CHECK(accuracy(s, parts.val) >= 0.95);
}

TEST_CASE("baseline training loss never increases") {
  const auto ds = rctest::synthetic_domain(rctest::Domain::Explicit, 120, 2, "b", Split::Train);
  BaselineConfig cfg;
  cfg.epochs = 60;
  const auto s = train_baseline(ds, cfg);
  const auto& loss = s.training_loss();
  REQUIRE(loss.size() == 61);
  for (std::size_t e = 1; e < loss.size(); ++e) CHECK(loss[e] <= loss[e - 1]);
  CHECK(loss.back() < loss.front());
}

TEST_CASE("baseline rejects single-class data and is deterministic") {
  const Dataset one("o", Split::Train, {{"a", "x y", Label::Suicide}, {"b", "z", Label::Suicide}});
  CHECK_THROWS_AS(train_baseline(one), DegenerateData);

  const auto ds = rctest::synthetic_domain(rctest::Domain::Implicit, 80, 4, "b", Split::Train);
  BaselineConfig cfg;
  cfg.epochs = 20;
  cfg.bits = 12;
  const auto a = train_baseline(ds, cfg);
  const auto b = train_baseline(ds, cfg);
  CHECK(a.weights() == b.weights());
  CHECK(a.bias() == b.bias());
  CHECK(a.serialize() == b.serialize());
}

TEST_CASE("baseline save and load are bit-exact") {
  rctest::TempDir dir("baseline");
  const auto ds = rctest::synthetic_domain(rctest::Domain::Explicit, 60, 8, "b", Split::Train);
  BaselineConfig cfg;
  cfg.epochs = 15;
  cfg.bits = 10;
  const auto s = train_baseline(ds, cfg);
  s.save(dir / "m.json");
  const auto back = BaselineScorer::load(dir / "m.json");
  CHECK(back.weights() == s.weights());
  for (const auto& p : ds) CHECK(back.score(p.text).value() == s.score(p.text).value());
  CHECK(back.serialize() == s.serialize());
  CHECK_THROWS_AS(BaselineScorer::deserialize(R"({"magic": "something else"})"), FormatError);
  CHECK_THROWS_AS(BaselineScorer::deserialize("not json"), FormatError);
  CHECK_THROWS_AS(BaselineScorer::deserialize(R"({"magic": "riskcascade.baseline", "format_version": 1})"), FormatError);
}

TEST_CASE("baseline scores stay strictly inside (0, 1)") {
  const auto ds = rctest::end_token_corpus(50, 1, "b");
  const auto s = train_baseline(ds);
  for (const auto& p : ds) {
    CHECK(s.score(p.text) > 0.0);
    CHECK(s.score(p.text) < 1.0);
  }
  CHECK(s.score("completely unseen words").value() > 0.0);
}

TEST_CASE("remote scorer speaks the score protocol") {
  rctest::MockServer server;
  std::atomic<int> hits{0};
  std::string last_text, last_auth;
  server.post("/score", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    const auto body = json::parse(req.body);
    last_text = body.at("text").get<std::string>();
    last_auth = req.get_header_value("Authorization");
    if (last_text == "too big") res.set_content(R"({"prob_suicide": 1.2})", "application/json");
    else if (last_text == "missing") res.set_content(R"({"p": 0.2})", "application/json");
    else if (last_text == "string") res.set_content(R"({"prob_suicide": "0.2"})", "application/json");
    else res.set_content(R"({"prob_suicide": 0.97})", "application/json");
  });
  server.post("/busy", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 503;
  });
  server.start();

  CHECK(remote_score(server.url("/score"), "hello \"there\"", fast_options()).value() == 0.97);
  CHECK(last_text == "hello \"there\"");
  CHECK_THROWS_AS(remote_score(server.url("/score"), "too big", fast_options()), ProtocolError);
  CHECK_THROWS_AS(remote_score(server.url("/score"), "missing", fast_options()), ProtocolError);
  CHECK_THROWS_AS(remote_score(server.url("/score"), "string", fast_options()), ProtocolError);

  hits = 0;
  CHECK_THROWS_AS(remote_score(server.url("/busy"), "x", fast_options(4)), TransportError);
  CHECK(hits == 4);

  ::setenv(kCredentialEnv, "sekrit", 1);
  RemoteScorer scorer(server.url(""), fast_options());
  CHECK(scorer.score("abc").value() == 0.97);
  CHECK(last_auth == "Bearer sekrit");
  ::unsetenv(kCredentialEnv);
}

TEST_CASE("unreachable scorer fails with a transport error") {
  const auto url = "http://127.0.0.1:" + std::to_string(rctest::closed_port()) + "/score";
  CHECK_THROWS_AS(remote_score(url, "x", fast_options(2)), TransportError);
  CHECK_THROWS_AS(remote_score("ftp://example.org/score", "x", fast_options()), PreconditionError);
}

TEST_CASE("http chat client speaks the chat protocol") {
  rctest::MockServer server;
  server.post("/chat", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    const auto user = body.at("user").get<std::string>();
    if (user == "bad") {
      res.set_content(R"({"text": "no content field"})", "application/json");
      return;
    }
    res.set_content(json{{"content", body.at("system").get<std::string>().substr(0, 10) + "|" + user}}.dump(),
                    "application/json");
  });
  server.start();

  HttpChatClient client(server.url("/chat"), fast_options());
  CHECK(client.chat({"You are a conservative", "hi"}) == "You are a |hi");
  CHECK_THROWS_AS(client.chat({"s", "bad"}), ProtocolError);
  CHECK(agent_classify(client, AgentPersona::Expert, "bad").is_abstain());
}

TEST_CASE("test doubles") {
  FixedScorer f(0.25);
  CHECK(f.score("anything").value() == 0.25);
  TableScorer t({{"a", 0.9}}, 0.1);
  CHECK(t.score("a").value() == 0.9);
  CHECK(t.score("b").value() == 0.1);
  CountingScorer c(t);
  c.score("a");
  c.score("z");
  CHECK(c.calls() == 2);
  CHECK_THROWS_AS(FixedScorer(1.5), PreconditionError);
}
