#include "frameplan/llm/provider.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "frameplan/error.hpp"
#include "frameplan/serialization.hpp"

namespace frameplan::llm {
namespace {

/// Lowercased words; '_' and '-' separate words so fixture names read like prose.
std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : s) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// True when the word sequence `needle` occurs contiguously in `hay`.
bool contains_phrase(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

const std::string* find_attachment(const PromptBundle& bundle, std::string_view label) {
  for (const auto& a : bundle.attachments) {
    if (a.label == label) return &a.payload;
  }
  return nullptr;
}

/// Only fixture names, classes and states matter to the keyword rule; the prompt document
/// carries exactly those.
Environment fixtures_from_prompt(const std::string& payload) {
  Environment env;
  auto doc = Json::parse(payload, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("fixtures") || !doc["fixtures"].is_object()) {
    return env;
  }
  for (const auto& [name, spec] : doc["fixtures"].items()) {
    FixtureSpec f;
    f.name = name;
    if (spec.contains("class") && spec["class"].is_string()) f.cls = spec["class"].get<std::string>();
    if (spec.contains("possibleStates") && spec["possibleStates"].is_array()) {
      for (const auto& st : spec["possibleStates"]) {
        if (st.is_string()) f.possibleStates.push_back(st.get<std::string>());
      }
    }
    env.fixtures.emplace(name, std::move(f));
  }
  return env;
}

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error(ErrorCode::ProviderError, "endpoint '" + url + "' has no scheme", url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

class HttplibTransport final : public Transport {
 public:
  HttpResponse post(const std::string& url, const std::string& body,
                    const std::vector<std::pair<std::string, std::string>>& headers,
                    double timeoutSeconds) override {
    const auto parts = split_url(url);
    httplib::Client client(parts.origin);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(timeoutSeconds));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(parts.path, h, body, "application/json");
    if (!res) {
      throw Error(ErrorCode::ProviderError, "request to " + parts.origin + " failed: " + httplib::to_string(res.error()));
    }
    return {res->status, res->body};
  }
};

}  // namespace

void ProviderConfig::validate() const {
  if (!(timeoutSeconds > 0)) throw Error(ErrorCode::BadRequest, "provider timeout must be positive", "timeoutSeconds");
  if (maxRetries < 0) throw Error(ErrorCode::BadRequest, "provider retries must not be negative", "maxRetries");
  if (retryBackoffSeconds < 0) {
    throw Error(ErrorCode::BadRequest, "retry backoff must not be negative", "retryBackoffSeconds");
  }
}

MockProvider::MockProvider(const std::filesystem::path& transcriptDir) : dir_(transcriptDir) {
  load_directory(transcriptDir);
}

void MockProvider::add_transcript(PromptKind kind, const std::string& digest, std::string text) {
  std::unique_lock lock(mutex_);
  transcripts_[{kind, digest}] = std::move(text);
}

void MockProvider::add_transcript(const PromptBundle& bundle, std::string text) {
  add_transcript(bundle.kind, bundle.digest(), std::move(text));
}

std::filesystem::path MockProvider::transcript_path(const std::filesystem::path& dir, PromptKind kind,
                                                    const std::string& digest) {
  return dir / std::string(to_string(kind)) / (digest + ".txt");
}

std::size_t MockProvider::load_directory(const std::filesystem::path& dir) {
  std::size_t loaded = 0;
  if (!std::filesystem::is_directory(dir)) return 0;
  for (auto kind : kAllPromptKinds) {
    const auto sub = dir / std::string(to_string(kind));
    if (!std::filesystem::is_directory(sub)) continue;
    for (const auto& entry : std::filesystem::directory_iterator(sub)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
      std::ifstream in(entry.path(), std::ios::binary);
      std::stringstream buf;
      buf << in.rdbuf();
      add_transcript(kind, entry.path().stem().string(), buf.str());
      ++loaded;
    }
  }
  return loaded;
}

Completion MockProvider::complete(const PromptBundle& bundle) {
  const auto digest = bundle.digest();
  {
    std::shared_lock lock(mutex_);
    auto it = transcripts_.find({bundle.kind, digest});
    if (it != transcripts_.end()) return {it->second, 1};
  }
  if (bundle.kind == PromptKind::Classify) {
    const auto* envPayload = find_attachment(bundle, kEnvironmentLabel);
    const auto* instruction = find_attachment(bundle, kInstructionLabel);
    if (envPayload != nullptr && instruction != nullptr) {
      const auto cls = keyword_classify(fixtures_from_prompt(*envPayload), *instruction);
      return {"[Class]: " + std::string(to_string(cls)) + "\n", 1};
    }
  }
  const std::string where =
      dir_.empty() ? std::string(to_string(bundle.kind)) + "/" + digest + ".txt" : transcript_path(dir_, bundle.kind, digest).string();
  throw Error(ErrorCode::TranscriptMissing, "no transcript for " + std::string(to_string(bundle.kind)) +
                                                " prompt (expected " + where + ")",
              digest);
}

InstructionClass keyword_classify(const Environment& env, std::string_view instruction) {
  static const std::vector<std::string> kSwitchVerbs = {"open", "close", "shut", "turn", "switch", "toggle"};
  const auto text = words(instruction);
  for (const auto& [name, fixture] : env.fixtures) {
    const bool named = contains_phrase(text, words(name)) || (!fixture.cls.empty() && contains_phrase(text, words(fixture.cls)));
    if (!named) continue;
    for (const auto& state : fixture.possibleStates) {
      if (contains_phrase(text, words(state))) return InstructionClass::FixtureStateChange;
    }
    for (const auto& verb : kSwitchVerbs) {
      if (std::find(text.begin(), text.end(), verb) != text.end()) return InstructionClass::FixtureStateChange;
    }
  }
  return InstructionClass::ObjectManipulation;
}

std::shared_ptr<Transport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

nlohmann::json ChatCompletionsShape::request(const ProviderConfig& config, const PromptBundle& bundle) const {
  return {{"model", config.model},
          {"temperature", config.temperature},
          {"messages",
           nlohmann::json::array({{{"role", "system"}, {"content", bundle.system}},
                                  {{"role", "user"}, {"content", bundle.user_text()}}})}};
}

std::string ChatCompletionsShape::extract_text(const nlohmann::json& response) const {
  const auto* text = [&]() -> const nlohmann::json* {
    if (!response.is_object() || !response.contains("choices") || !response["choices"].is_array() ||
        response["choices"].empty()) {
      return nullptr;
    }
    const auto& choice = response["choices"][0];
    if (!choice.contains("message") || !choice["message"].contains("content")) return nullptr;
    return &choice["message"]["content"];
  }();
  if (text == nullptr || !text->is_string()) {
    throw Error(ErrorCode::ProviderError, "response has no choices[0].message.content text");
  }
  return text->get<std::string>();
}

HttpProvider::HttpProvider(ProviderConfig config, std::shared_ptr<Transport> transport,
                           std::shared_ptr<const RequestShape> shape)
    : config_(std::move(config)),
      transport_(transport ? std::move(transport) : make_http_transport()),
      shape_(shape ? std::move(shape) : std::make_shared<ChatCompletionsShape>()) {
  config_.validate();
}

Completion HttpProvider::complete(const PromptBundle& bundle) {
  std::vector<std::pair<std::string, std::string>> headers;
  if (!config_.apiKeyEnv.empty()) {
    const char* key = std::getenv(config_.apiKeyEnv.c_str());
    if (key == nullptr || *key == '\0') {
      throw Error(ErrorCode::ProviderError, "environment variable " + config_.apiKeyEnv + " holds no API key",
                  config_.apiKeyEnv);
    }
    headers.emplace_back("Authorization", std::string("Bearer ") + key);
  }
  const std::string body = shape_->request(config_, bundle).dump();
  const int attempts = 1 + config_.maxRetries;
  std::string lastFailure;
  double backoff = config_.retryBackoffSeconds;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    try {
      const auto res = transport_->post(config_.endpoint, body, headers, config_.timeoutSeconds);
      if (res.status < 200 || res.status >= 300) {
        lastFailure = "HTTP " + std::to_string(res.status);
      } else {
        auto doc = nlohmann::json::parse(res.body, nullptr, false);
        if (doc.is_discarded()) {
          lastFailure = "response body is not JSON";
        } else {
          return {shape_->extract_text(doc), attempt};
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ProviderError) throw;
      lastFailure = e.what();
    }
    if (attempt < attempts && backoff > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= 2;
    }
  }
  throw Error(ErrorCode::ProviderError,
              "provider failed after " + std::to_string(attempts) + " attempts: " + lastFailure,
              std::to_string(attempts));
}

}  // namespace frameplan::llm
