#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "frameplan/llm/prompts.hpp"

namespace frameplan::llm {

struct ProviderConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o-2024-05-13";
  double timeoutSeconds = 60.0;
  int maxRetries = 2;
  double temperature = 0.0;
  std::string apiKeyEnv = "OPENAI_API_KEY";
  double retryBackoffSeconds = 0.5;  // doubled after each failed attempt

  void validate() const;  // throws BadRequest on timeout <= 0, retries < 0 or negative backoff
};

struct Completion {
  std::string text;
  int attempts = 1;
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual Completion complete(const PromptBundle& bundle) = 0;
  virtual std::string_view name() const = 0;
};

/// Offline provider replaying canned transcripts keyed by (kind, bundle digest).
///
/// Transcript directories hold `<kind>/<digest>.txt`. Classification prompts without a
/// transcript fall back to a keyword rule over the attached environment and instruction,
/// so classification stays a pure function of (environment, text). Thread-safe.
class MockProvider final : public Provider {
 public:
  MockProvider() = default;
  explicit MockProvider(const std::filesystem::path& transcriptDir);

  void add_transcript(PromptKind kind, const std::string& digest, std::string text);
  void add_transcript(const PromptBundle& bundle, std::string text);
  std::size_t load_directory(const std::filesystem::path& dir);

  Completion complete(const PromptBundle& bundle) override;
  std::string_view name() const override { return "mock"; }

  static std::filesystem::path transcript_path(const std::filesystem::path& dir, PromptKind kind,
                                               const std::string& digest);

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::pair<PromptKind, std::string>, std::string> transcripts_;
  std::filesystem::path dir_;
};

/// Keyword classifier backing the mock: an instruction that names a fixture together with
/// one of its states or a switching verb changes fixture state; anything else manipulates
/// objects.
InstructionClass keyword_classify(const Environment& env, std::string_view instruction);

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Moves request bytes; throws ProviderError on connection failure or timeout.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& url, const std::string& body,
                            const std::vector<std::pair<std::string, std::string>>& headers,
                            double timeoutSeconds) = 0;
};

std::shared_ptr<Transport> make_http_transport();

/// Maps a bundle to the provider's wire request and the reply back to text.
class RequestShape {
 public:
  virtual ~RequestShape() = default;
  virtual nlohmann::json request(const ProviderConfig& config, const PromptBundle& bundle) const = 0;
  virtual std::string extract_text(const nlohmann::json& response) const = 0;
};

/// Chat-completions shape: system message = template, user message = attachments.
class ChatCompletionsShape final : public RequestShape {
 public:
  nlohmann::json request(const ProviderConfig& config, const PromptBundle& bundle) const override;
  std::string extract_text(const nlohmann::json& response) const override;
};

class HttpProvider final : public Provider {
 public:
  explicit HttpProvider(ProviderConfig config, std::shared_ptr<Transport> transport = nullptr,
                        std::shared_ptr<const RequestShape> shape = nullptr);

  /// Up to 1 + maxRetries attempts; the final failure raises ProviderError naming the count.
  Completion complete(const PromptBundle& bundle) override;
  std::string_view name() const override { return "live"; }

 private:
  ProviderConfig config_;
  std::shared_ptr<Transport> transport_;
  std::shared_ptr<const RequestShape> shape_;
};

}  // namespace frameplan::llm
