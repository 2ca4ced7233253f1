#include <httplib.h>

#include <atomic>
#include <cmath>
#include <thread>

#include "doctest.h"
#include "support.hpp"
#include "vectrans/error.hpp"
#include "vectrans/llm.hpp"

using namespace vectrans;
using json = nlohmann::json;

TEST_CASE("ledger arithmetic") {
  CostLedger l;
  l.add({21900, 5300});
  CHECK(std::fabs(l.cost() - (21900 * 0.27 + 5300 * 1.10) / 1e6) < 1e-12);
  CHECK(l.cost() >= 0.0117);
  CHECK(l.cost() <= 0.0118);
  SharedLedger shared;
  shared.add({1, 2});
  shared.add({3, 4});
  CHECK(shared.snapshot().input_tokens == 4);
  CHECK(shared.snapshot().output_tokens == 6);
  CHECK(estimate_tokens("") == 0);
  CHECK(estimate_tokens("abcde") == 2);
}

TEST_CASE("config validation") {
  LlmConfig c;
  c.validate();
  c.max_tokens = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("prompt templates") {
  std::string p = render_refine_prompt("void s1(int n) { }", "", "compile=Ok");
  CHECK(p.find("none yet") != std::string::npos);
  CHECK(p.find("s1") != std::string::npos);
  CHECK(p.find("// VECTRANS_BEGIN") != std::string::npos);
  CHECK(p.find("// VECTRANS_NO_BENEFIT:") != std::string::npos);
  CHECK(p.find("Loop Splitting") != std::string::npos);
  CHECK(p.find("Branch Elimination") != std::string::npos);
  CHECK_THROWS_AS(render_refine_prompt("void s1(void) {}", "", "   "), std::invalid_argument);
  CHECK(prompt_kind_from_string("refine") == PromptKind::Refine);
  CHECK(prompt_kind_from_string("SelfFeedback") == PromptKind::SelfFeedback);
  CHECK_FALSE(prompt_kind_from_string("other").has_value());
  for (auto k : {PromptKind::Refine, PromptKind::SelfFeedback, PromptKind::TestGeneration}) {
    CHECK_FALSE(prompt_template(k).empty());
  }
}

TEST_CASE("replay provider serves per-case and shared queues") {
  std::vector<TranscriptEntry> entries{
      {std::string("a"), PromptKind::Refine, "a1", 10, 1},
      {std::nullopt, PromptKind::Refine, "shared1", 5, 1},
      {std::string("a"), PromptKind::SelfFeedback, "a2", 10, 1},
  };
  ReplayProvider p(entries);
  CHECK(p.complete(PromptKind::Refine, "", "a").text == "a1");
  CHECK_THROWS_AS(p.complete(PromptKind::Refine, "", "a"), TranscriptMismatch);
  CHECK(p.complete(PromptKind::SelfFeedback, "", "a").text == "a2");
  CHECK_THROWS_AS(p.complete(PromptKind::Refine, "", "a"), TranscriptExhausted);
  CHECK(p.complete(PromptKind::Refine, "", "b").text == "shared1");
  CHECK(p.remaining("b") == 0);
}

TEST_CASE("transcript round trip") {
  auto dir = vt_test::scratch("transcript");
  std::vector<TranscriptEntry> entries{{std::string("x"), PromptKind::Refine, "hello", 3, 4}};
  write_file(dir / "t.json", transcript_to_json(entries).dump());
  auto back = load_transcript(dir / "t.json");
  REQUIRE(back.size() == 1);
  CHECK(back[0].case_id == "x");
  CHECK(back[0].response_text == "hello");
  CHECK(back[0].usage_out == 4);
  write_file(dir / "bad.json", "{\"nope\": 1}");
  CHECK_THROWS_AS(load_transcript(dir / "bad.json"), ParseError);
  for (const char* f : {"s1113.transcript.json", "fixture_corpus.transcript.json", "malformed20.transcript.json"}) {
    CHECK_FALSE(load_transcript(vt_test::fixtures() / "transcripts" / f).empty());
  }
}

TEST_CASE("client rejects oversized prompts before calling the provider") {
  LlmConfig cfg;
  cfg.context_window = 5000;
  auto provider = std::make_shared<ReplayProvider>(
      std::vector<TranscriptEntry>{{std::nullopt, PromptKind::Refine, "ok", 1, 1}});
  LlmClient client(cfg, provider);
  SharedLedger ledger;
  CHECK_THROWS_AS(client.complete(PromptKind::Refine, refine_slots(std::string(20000, 'x'), "", "f"), "c", &ledger),
                  PromptTooLarge);
  CHECK(provider->remaining("c") == 1);
  CHECK(client.complete(PromptKind::Refine, refine_slots("void f(void) {}", "", "f"), "c", &ledger).text == "ok");
  CHECK(ledger.snapshot().input_tokens == 1);
}

namespace {

struct FakeEndpoint {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> calls{0};
  std::atomic<int> fail_first{0};
  int fail_status = 500;
  std::string last_body;
  std::string last_auth;

  FakeEndpoint() {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      int n = calls++;
      last_body = req.body;
      last_auth = req.get_header_value("Authorization");
      if (n < fail_first) {
        res.status = fail_status;
        res.set_content("{\"error\":\"busy\"}", "application/json");
        return;
      }
      json reply{{"choices", {{{"message", {{"role", "assistant"}, {"content", "// VECTRANS_DONE"}}}}}},
                 {"usage", {{"prompt_tokens", 120}, {"completion_tokens", 7}}}};
      res.set_content(reply.dump(), "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeEndpoint() {
    server.stop();
    thread.join();
  }
  LlmConfig config() const {
    LlmConfig c;
    c.provider = HttpEndpoint{"http://127.0.0.1:" + std::to_string(port) + "/v1"};
    c.retry_base = std::chrono::milliseconds(1);
    c.api_key_env = "VECTRANS_TEST_KEY";
    c.sampling = json{{"temperature", 0.0}};
    return c;
  }
};

}  // namespace

TEST_CASE("http provider speaks the chat-completions protocol") {
  FakeEndpoint fake;
  ::setenv("VECTRANS_TEST_KEY", "sk-test", 1);
  HttpProvider p(fake.config());
  ::unsetenv("VECTRANS_TEST_KEY");
  auto c = p.complete(PromptKind::Refine, "hello", "s1");
  CHECK(c.text == "// VECTRANS_DONE");
  CHECK(c.usage.in == 120);
  CHECK(c.usage.out == 7);
  auto body = json::parse(fake.last_body);
  CHECK(body["model"] == "deepseek-chat");
  CHECK(body["messages"][0]["content"] == "hello");
  CHECK(body["temperature"] == 0.0);
  CHECK(body["stream"] == false);
  CHECK(fake.last_auth == "Bearer sk-test");
}

TEST_CASE("http provider retries transient failures") {
  FakeEndpoint fake;
  fake.fail_first = 2;
  HttpProvider p(fake.config());
  CHECK(p.complete(PromptKind::Refine, "x", "s").text == "// VECTRANS_DONE");
  CHECK(fake.calls == 3);
  CHECK(fake.last_auth.empty());

  FakeEndpoint down;
  down.fail_first = 100;
  HttpProvider q(down.config());
  CHECK_THROWS_AS(q.complete(PromptKind::Refine, "x", "s"), ProviderError);
  CHECK(down.calls == 4);
}

TEST_CASE("http provider does not retry auth failures") {
  FakeEndpoint fake;
  fake.fail_first = 100;
  fake.fail_status = 401;
  HttpProvider p(fake.config());
  CHECK_THROWS_AS(p.complete(PromptKind::Refine, "x", "s"), ProviderError);
  CHECK(fake.calls == 1);
}

TEST_CASE("recording provider captures exchanges as a replayable transcript") {
  FakeEndpoint fake;
  auto rec = std::make_shared<RecordingProvider>(std::make_shared<HttpProvider>(fake.config()));
  rec->complete(PromptKind::Refine, "p", "s1113");
  auto dir = vt_test::scratch("record");
  rec->write(dir / "t.json");
  ReplayProvider replay(load_transcript(dir / "t.json"));
  auto c = replay.complete(PromptKind::Refine, "anything", "s1113");
  CHECK(c.text == "// VECTRANS_DONE");
  CHECK(c.usage.in == 120);
}
