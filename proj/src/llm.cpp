#include "vectrans/llm.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "httplib.h"
#include "vectrans/assets.hpp"
#include "vectrans/corpus.hpp"
#include "vectrans/error.hpp"

namespace vectrans {

using json = nlohmann::json;

std::string_view to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::SelfFeedback: return "SelfFeedback";
    case PromptKind::Refine: return "Refine";
    case PromptKind::TestGeneration: return "TestGeneration";
  }
  return "Refine";
}

std::optional<PromptKind> prompt_kind_from_string(std::string_view s) {
  if (s == "SelfFeedback" || s == "self_feedback") return PromptKind::SelfFeedback;
  if (s == "Refine" || s == "refine") return PromptKind::Refine;
  if (s == "TestGeneration" || s == "test_generation") return PromptKind::TestGeneration;
  return std::nullopt;
}

std::string_view prompt_template(PromptKind kind) {
  switch (kind) {
    case PromptKind::SelfFeedback: return assets::get("prompts/self_feedback.txt");
    case PromptKind::Refine: return assets::get("prompts/refine.txt");
    case PromptKind::TestGeneration: return assets::get("prompts/test_generation.txt");
  }
  return {};
}

void LlmConfig::validate() const {
  if (max_tokens <= 0) throw ConfigError("llm.max_tokens must be positive");
  if (context_window <= max_tokens) throw ConfigError("llm.context_window must exceed max_tokens");
  if (max_retries < 0) throw ConfigError("llm.max_retries must not be negative");
  if (price_in_per_million < 0 || price_out_per_million < 0) throw ConfigError("llm prices must not be negative");
  if (const auto* http = std::get_if<HttpEndpoint>(&provider); http && http->url.empty()) {
    throw ConfigError("llm http endpoint has an empty url");
  }
}

double CostLedger::cost() const {
  return static_cast<double>(input_tokens) * price_in_per_million / 1e6 +
         static_cast<double>(output_tokens) * price_out_per_million / 1e6;
}

void SharedLedger::add(const Usage& u) {
  std::lock_guard lock(mu_);
  ledger_.add(u);
}

CostLedger SharedLedger::snapshot() const {
  std::lock_guard lock(mu_);
  return ledger_;
}

long long estimate_tokens(std::string_view text) { return static_cast<long long>((text.size() + 3) / 4); }

// ---------------------------------------------------------------- transcripts

namespace {

TranscriptEntry entry_from_json(const json& j) {
  TranscriptEntry e;
  if (j.contains("case_id") && !j["case_id"].is_null()) e.case_id = j["case_id"].get<std::string>();
  auto kind = prompt_kind_from_string(j.at("expected_prompt_kind").get<std::string>());
  if (!kind) throw ParseError("unknown prompt kind in transcript: " + j["expected_prompt_kind"].dump());
  e.expected_prompt_kind = *kind;
  e.response_text = j.at("response_text").get<std::string>();
  e.usage_in = j.value("usage_in", 0LL);
  e.usage_out = j.value("usage_out", 0LL);
  return e;
}

}  // namespace

std::vector<TranscriptEntry> load_transcript(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("transcript " + path.string() + ": " + e.what());
  }
  const json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("entries")) throw ParseError("transcript " + path.string() + " has no 'entries'");
    list = &doc["entries"];
  }
  if (!list->is_array()) throw ParseError("transcript " + path.string() + ": entries must be an array");
  std::vector<TranscriptEntry> out;
  try {
    for (const auto& j : *list) out.push_back(entry_from_json(j));
  } catch (const json::exception& e) {
    throw ParseError("transcript " + path.string() + ": " + e.what());
  }
  return out;
}

json transcript_to_json(const std::vector<TranscriptEntry>& entries) {
  json list = json::array();
  for (const auto& e : entries) {
    json j;
    if (e.case_id) j["case_id"] = *e.case_id;
    j["expected_prompt_kind"] = to_string(e.expected_prompt_kind);
    j["response_text"] = e.response_text;
    j["usage_in"] = e.usage_in;
    j["usage_out"] = e.usage_out;
    list.push_back(std::move(j));
  }
  return json{{"schema", "vectrans-transcript/1"}, {"entries", std::move(list)}};
}

ReplayProvider::ReplayProvider(std::vector<TranscriptEntry> entries) {
  for (auto& e : entries) {
    if (e.case_id) {
      per_case_[*e.case_id].push_back(std::move(e));
    } else {
      shared_.push_back(std::move(e));
    }
  }
}

std::shared_ptr<ReplayProvider> ReplayProvider::from_file(const std::filesystem::path& path) {
  return std::make_shared<ReplayProvider>(load_transcript(path));
}

Completion ReplayProvider::complete(PromptKind kind, const std::string& /*prompt*/, const std::string& case_id) {
  std::lock_guard lock(mu_);
  auto it = per_case_.find(case_id);
  std::deque<TranscriptEntry>& queue = it != per_case_.end() ? it->second : shared_;
  if (queue.empty()) {
    throw TranscriptExhausted("transcript has no response left for case '" + case_id + "' (" +
                              std::string(to_string(kind)) + ")");
  }
  const TranscriptEntry& next = queue.front();
  if (next.expected_prompt_kind != kind) {
    throw TranscriptMismatch("case '" + case_id + "': transcript expects " +
                             std::string(to_string(next.expected_prompt_kind)) + " but got " +
                             std::string(to_string(kind)));
  }
  Completion c{next.response_text, Usage{next.usage_in, next.usage_out}};
  queue.pop_front();
  return c;
}

size_t ReplayProvider::remaining(const std::string& case_id) const {
  std::lock_guard lock(mu_);
  auto it = per_case_.find(case_id);
  return it != per_case_.end() ? it->second.size() : shared_.size();
}

// ----------------------------------------------------------------------- http

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string base_path;
};

SplitUrl split_url(const std::string& url) {
  size_t scheme_end = url.find("://");
  size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  size_t path_begin = url.find('/', host_begin);
  SplitUrl s;
  s.origin = url.substr(0, path_begin);
  s.base_path = path_begin == std::string::npos ? "" : url.substr(path_begin);
  while (!s.base_path.empty() && s.base_path.back() == '/') s.base_path.pop_back();
  return s;
}

}  // namespace

HttpProvider::HttpProvider(LlmConfig config) : config_(std::move(config)) {
  if (!std::holds_alternative<HttpEndpoint>(config_.provider)) throw ConfigError("HttpProvider needs an http endpoint");
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
  }
}

json HttpProvider::request_body(const std::string& prompt) const {
  json body = config_.sampling.is_object() ? config_.sampling : json::object();
  body["model"] = config_.model_name;
  body["max_tokens"] = config_.max_tokens;
  body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
  body["stream"] = false;
  return body;
}

namespace {

struct AttemptFailure {
  std::string message;
  bool retryable = true;
};

}  // namespace

Completion HttpProvider::attempt(const std::string& prompt) {
  const auto& endpoint = std::get<HttpEndpoint>(config_.provider);
  SplitUrl url = split_url(endpoint.url);
  httplib::Client client(url.origin);
  client.set_connection_timeout(std::chrono::seconds(30));
  client.set_read_timeout(config_.request_timeout);
  client.set_write_timeout(std::chrono::seconds(60));
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto res = client.Post(url.base_path + "/chat/completions", headers, request_body(prompt).dump(), "application/json");
  if (!res) throw AttemptFailure{"request failed: " + httplib::to_string(res.error()), true};
  if (res->status == 401 || res->status == 403) {
    throw AttemptFailure{"authentication rejected (HTTP " + std::to_string(res->status) + ")", false};
  }
  if (res->status != 200) {
    throw AttemptFailure{"HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500), true};
  }
  try {
    json doc = json::parse(res->body);
    Completion c;
    c.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
    if (doc.contains("usage")) {
      c.usage.in = doc["usage"].value("prompt_tokens", 0LL);
      c.usage.out = doc["usage"].value("completion_tokens", 0LL);
    }
    return c;
  } catch (const json::exception& e) {
    throw AttemptFailure{std::string("malformed completion response: ") + e.what(), true};
  }
}

Completion HttpProvider::complete(PromptKind /*kind*/, const std::string& prompt, const std::string& /*case_id*/) {
  std::string last;
  for (int attempt_no = 0; attempt_no <= config_.max_retries; ++attempt_no) {
    if (attempt_no > 0) std::this_thread::sleep_for(config_.retry_base * (1 << (attempt_no - 1)));
    try {
      return attempt(prompt);
    } catch (const AttemptFailure& f) {
      last = f.message;
      if (!f.retryable) throw ProviderError(last);
    }
  }
  throw ProviderError(last + " (after " + std::to_string(config_.max_retries) + " retries)");
}

Completion RecordingProvider::complete(PromptKind kind, const std::string& prompt, const std::string& case_id) {
  Completion c = inner_->complete(kind, prompt, case_id);
  std::lock_guard lock(mu_);
  entries_.push_back(TranscriptEntry{case_id, kind, c.text, c.usage.in, c.usage.out});
  return c;
}

std::vector<TranscriptEntry> RecordingProvider::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

void RecordingProvider::write(const std::filesystem::path& path) const {
  write_file(path, transcript_to_json(entries()).dump(2) + "\n");
}

std::shared_ptr<Provider> make_provider(const LlmConfig& config) {
  config.validate();
  if (const auto* replay = std::get_if<TranscriptReplay>(&config.provider)) {
    return ReplayProvider::from_file(replay->path);
  }
  return std::make_shared<HttpProvider>(config);
}

// --------------------------------------------------------------------- client

LlmClient::LlmClient(LlmConfig config, std::shared_ptr<Provider> provider)
    : config_(std::move(config)), provider_(std::move(provider)) {
  config_.validate();
  if (!provider_) throw ConfigError("LlmClient needs a provider");
}

std::string LlmClient::render(PromptKind kind, const SlotMap& slots) const {
  return instantiate(prompt_template(kind), slots);
}

Completion LlmClient::complete(PromptKind kind, const SlotMap& slots, const std::string& case_id,
                               SharedLedger* ledger) const {
  std::string prompt = render(kind, slots);
  long long need = estimate_tokens(prompt) + config_.max_tokens;
  if (need > config_.context_window) {
    throw PromptTooLarge("prompt needs ~" + std::to_string(need) + " tokens including the completion budget; window is " +
                         std::to_string(config_.context_window));
  }
  Completion c = provider_->complete(kind, prompt, case_id);
  if (ledger != nullptr) ledger->add(c.usage);
  return c;
}

SlotMap refine_slots(std::string_view source, std::string_view candidate, std::string_view feedback) {
  if (trim(feedback).empty()) throw std::invalid_argument("refine prompt needs a non-empty feedback rendering");
  std::string cand = trim(candidate).empty() ? std::string("none yet") : "```c\n" + std::string(candidate) + "\n```";
  std::string name = "the function";
  try {
    auto split = split_translation_unit(source);
    if (!split.functions.empty()) name = split.functions.front().name;
  } catch (const ParseError&) {
  }
  return SlotMap{{"SOURCE", std::string(source)},
                 {"CANDIDATE", cand},
                 {"FEEDBACK", std::string(feedback)},
                 {"FUNCTION_NAME", name}};
}

std::string render_refine_prompt(std::string_view source, std::string_view candidate, std::string_view feedback) {
  return instantiate(prompt_template(PromptKind::Refine), refine_slots(source, candidate, feedback));
}

}  // namespace vectrans
