#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "frameplan/error.hpp"
#include "frameplan/service/session_service.hpp"

namespace frameplan::service {

struct ApiOptions {
  /// Model-backed requests running longer than this answer 202 with a job id.
  std::chrono::milliseconds pendingAfter{2000};
};

/// HTTP binding of SessionService. Errors answer with {code, message, detail}:
/// NotFound 404, RevisionConflict 409, ValidationFailed 422, ProviderError 502,
/// malformed requests 400.
class ApiServer {
 public:
  ApiServer(std::shared_ptr<SessionService> service, ApiOptions options = {});
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Blocks until stop(). Returns false when the address cannot be bound.
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it (or -1); follow with listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

int http_status(ErrorCode code) noexcept;
Json error_body(const Error& error);

}  // namespace frameplan::service
