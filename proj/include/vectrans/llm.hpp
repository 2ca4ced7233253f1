#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "vectrans/text.hpp"

namespace vectrans {

enum class PromptKind { SelfFeedback, Refine, TestGeneration };

std::string_view to_string(PromptKind kind);
/// Accepts the enum spelling ("Refine") and the snake form ("refine").
std::optional<PromptKind> prompt_kind_from_string(std::string_view s);
/// The template asset text for a prompt kind.
std::string_view prompt_template(PromptKind kind);

struct HttpEndpoint {
  std::string url;  ///< base URL; "/chat/completions" is appended
};

struct TranscriptReplay {
  std::filesystem::path path;
};

struct LlmConfig {
  std::variant<HttpEndpoint, TranscriptReplay> provider = TranscriptReplay{};
  std::string model_name = "deepseek-chat";
  int max_tokens = 4096;
  /// Extra request fields (temperature, top_p, ...) copied verbatim.
  nlohmann::json sampling = nlohmann::json::object();
  std::string api_key_env = "DEEPSEEK_API_KEY";
  double price_in_per_million = 0.27;
  double price_out_per_million = 1.10;
  /// Prompt estimate plus max_tokens must fit in this many tokens.
  int context_window = 65536;
  int max_retries = 3;
  std::chrono::milliseconds retry_base{500};
  std::chrono::seconds request_timeout{600};

  /// Throws ConfigError on non-positive limits.
  void validate() const;
  bool is_replay() const { return std::holds_alternative<TranscriptReplay>(provider); }
};

struct Usage {
  long long in = 0;
  long long out = 0;
};

struct Completion {
  std::string text;
  Usage usage;
};

struct CostLedger {
  long long input_tokens = 0;
  long long output_tokens = 0;
  double price_in_per_million = 0.27;
  double price_out_per_million = 1.10;

  void add(const Usage& u) {
    input_tokens += u.in;
    output_tokens += u.out;
  }
  double cost() const;
};

/// CostLedger behind a mutex, for completions issued from several threads.
class SharedLedger {
 public:
  explicit SharedLedger(CostLedger initial = {}) : ledger_(initial) {}
  void add(const Usage& u);
  CostLedger snapshot() const;

 private:
  mutable std::mutex mu_;
  CostLedger ledger_;
};

/// Rough token estimate: one token per four bytes, rounded up.
long long estimate_tokens(std::string_view text);

class Provider {
 public:
  virtual ~Provider() = default;
  /// `case_id` keys replay queues; live providers ignore it.
  virtual Completion complete(PromptKind kind, const std::string& prompt, const std::string& case_id) = 0;
};

struct TranscriptEntry {
  std::optional<std::string> case_id;
  PromptKind expected_prompt_kind = PromptKind::Refine;
  std::string response_text;
  long long usage_in = 0;
  long long usage_out = 0;
};

std::vector<TranscriptEntry> load_transcript(const std::filesystem::path& path);
nlohmann::json transcript_to_json(const std::vector<TranscriptEntry>& entries);

/// Serves recorded responses in order. Entries carrying a case_id form one
/// queue per case; the rest form a shared queue used by any case without
/// its own entries. Throws TranscriptExhausted when a queue runs dry and
/// TranscriptMismatch when the next entry expects a different prompt kind.
class ReplayProvider : public Provider {
 public:
  explicit ReplayProvider(std::vector<TranscriptEntry> entries);
  static std::shared_ptr<ReplayProvider> from_file(const std::filesystem::path& path);

  Completion complete(PromptKind kind, const std::string& prompt, const std::string& case_id) override;
  size_t remaining(const std::string& case_id) const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::deque<TranscriptEntry>> per_case_;
  std::deque<TranscriptEntry> shared_;
};

/// OpenAI-compatible chat-completion endpoint. Auth failures (401/403)
/// throw ProviderError immediately; other failures are retried
/// `max_retries` times with exponential backoff before throwing.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(LlmConfig config);
  Completion complete(PromptKind kind, const std::string& prompt, const std::string& case_id) override;

  /// The request body sent for `prompt`.
  nlohmann::json request_body(const std::string& prompt) const;

 private:
  Completion attempt(const std::string& prompt);

  LlmConfig config_;
  std::string api_key_;
};

/// Forwards to another provider and keeps every exchange as a transcript entry.
class RecordingProvider : public Provider {
 public:
  explicit RecordingProvider(std::shared_ptr<Provider> inner) : inner_(std::move(inner)) {}
  Completion complete(PromptKind kind, const std::string& prompt, const std::string& case_id) override;
  std::vector<TranscriptEntry> entries() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::shared_ptr<Provider> inner_;
  mutable std::mutex mu_;
  std::vector<TranscriptEntry> entries_;
};

std::shared_ptr<Provider> make_provider(const LlmConfig& config);

class LlmClient {
 public:
  LlmClient(LlmConfig config, std::shared_ptr<Provider> provider);

  const LlmConfig& config() const { return config_; }

  /// Renders the template for `kind` (SlotMissing if a slot is absent),
  /// rejects prompts that cannot fit (PromptTooLarge), calls the provider
  /// and adds the usage to `ledger` when given.
  Completion complete(PromptKind kind, const SlotMap& slots, const std::string& case_id,
                      SharedLedger* ledger = nullptr) const;

  std::string render(PromptKind kind, const SlotMap& slots) const;

 private:
  LlmConfig config_;
  std::shared_ptr<Provider> provider_;
};

/// The refine prompt. An empty candidate is shown as "none yet"; an empty
/// feedback rendering throws std::invalid_argument.
std::string render_refine_prompt(std::string_view source, std::string_view candidate, std::string_view feedback);

SlotMap refine_slots(std::string_view source, std::string_view candidate, std::string_view feedback);

}  // namespace vectrans
