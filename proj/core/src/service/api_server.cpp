#include "frameplan/service/api_server.hpp"

#include <atomic>
#include <future>
#include <map>
#include <mutex>

#include <httplib.h>

#include "frameplan/error.hpp"

namespace frameplan::service {
namespace {

struct Reply {
  int status = 200;
  std::string body;
  std::string contentType = "application/json";
};

Reply json_reply(const Json& doc, int status = 200) { return {status, doc.dump(), "application/json"}; }

Reply guarded(const std::function<Reply()>& handler) {
  try {
    return handler();
  } catch (const Error& e) {
    return json_reply(error_body(e), http_status(e.code()));
  } catch (const std::exception& e) {
    return json_reply({{"code", "Internal"}, {"message", e.what()}, {"detail", ""}}, 500);
  }
}

Json body_of(const std::string& raw) {
  if (raw.empty()) return Json::object();
  Json doc = parse_document(raw, "request body");
  if (!doc.is_object()) throw Error(ErrorCode::BadRequest, "request body must be an object");
  return doc;
}

std::optional<std::uint64_t> revision_of(const Json& body) {
  auto it = body.find("revision");
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_unsigned()) throw Error(ErrorCode::BadRequest, "'revision' must be a non-negative integer", "revision");
  return it->get<std::uint64_t>();
}

std::size_t index_of(const std::string& text) {
  try {
    return static_cast<std::size_t>(std::stoull(text));
  } catch (const std::exception&) {
    throw Error(ErrorCode::BadRequest, "'" + text + "' is not an index", text);
  }
}

}  // namespace

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::IndexOutOfRange: return 404;
    case ErrorCode::RevisionConflict:
    case ErrorCode::StaleProposal: return 409;
    case ErrorCode::ProviderError:
    case ErrorCode::TranscriptMissing:
    case ErrorCode::MissingInstructionMarker:
    case ErrorCode::MissingResponseMarker:
    case ErrorCode::UnparseableClass:
    case ErrorCode::UnparseableDelta:
    case ErrorCode::UnknownName:
    case ErrorCode::UnparseableList:
    case ErrorCode::BadChangeNeeded:
    case ErrorCode::UnknownPrimitive:
    case ErrorCode::ArityError:
    case ErrorCode::UnparseableCall: return 502;  // the model answered with something unusable
    case ErrorCode::BadRequest:
    case ErrorCode::ParseError:
    case ErrorCode::SchemaError: return 400;
    case ErrorCode::IoError: return 500;
    default: return 422;
  }
}

Json error_body(const Error& error) {
  return {{"code", to_string(error.code())}, {"message", error.what()}, {"detail", error.detail()}};
}

struct ApiServer::Impl {
  std::shared_ptr<SessionService> service;
  ApiOptions options;
  httplib::Server server;
  std::mutex jobsMutex;
  std::map<std::string, std::shared_future<Reply>> jobs;
  std::atomic<std::uint64_t> jobCounter{0};

  void send(httplib::Response& res, const Reply& reply) { res.set_content(reply.body, reply.contentType); res.status = reply.status; }

  /// Model-backed work answers synchronously unless it outlives `pendingAfter`; then the
  /// client gets 202 with a job id to poll.
  void send_pendable(httplib::Response& res, std::function<Reply()> work) {
    std::shared_future<Reply> future = std::async(std::launch::async, [w = std::move(work)] { return guarded(w); }).share();
    if (future.wait_for(options.pendingAfter) == std::future_status::ready) {
      send(res, future.get());
      return;
    }
    const std::string id = "job-" + std::to_string(++jobCounter);
    {
      std::lock_guard lock(jobsMutex);
      jobs.emplace(id, future);
    }
    send(res, json_reply({{"job", id}, {"status", "pending"}}, 202));
  }

  void routes() {
    auto& s = server;
    s.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      send(res, json_reply({{"status", "ok"}, {"provider", service->provider().name()}}));
    });
    s.Get("/bundles", [this](const httplib::Request&, httplib::Response& res) {
      send(res, json_reply({{"bundles", service->catalog().ids()}}));
    });
    s.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, guarded([&] {
        const Json body = body_of(req.body);
        if (body.contains("archive")) return json_reply(service->create_session_from_archive(body["archive"]), 201);
        if (!body.contains("bundle") || !body["bundle"].is_string()) {
          throw Error(ErrorCode::BadRequest, "body needs 'bundle' or 'archive'", "bundle");
        }
        return json_reply(service->create_session(body["bundle"].get<std::string>()), 201);
      }));
    });
    s.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, guarded([&] { return json_reply(service->describe(req.matches[1])); }));
    });
    s.Post(R"(/sessions/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
      send_pendable(res, [this, id = std::string(req.matches[1]), raw = req.body] {
        const Json body = body_of(raw);
        if (!body.contains("event")) throw Error(ErrorCode::BadRequest, "body needs 'event'", "event");
        return json_reply(service->post_event(id, revision_of(body), body["event"]));
      });
    });
    s.Patch(R"(/sessions/([^/]+)/steps/(\d+)/caption)", [this](const httplib::Request& req, httplib::Response& res) {
      send_pendable(res, [this, id = std::string(req.matches[1]), index = std::string(req.matches[2]), raw = req.body] {
        const Json body = body_of(raw);
        if (!body.contains("text") || !body["text"].is_string()) throw Error(ErrorCode::BadRequest, "body needs 'text'", "text");
        const bool linked = body.value("linked", true);
        return json_reply(service->edit_caption(id, index_of(index), body["text"].get<std::string>(), linked, revision_of(body)));
      });
    });
    s.Post(R"(/sessions/([^/]+)/instruct)", [this](const httplib::Request& req, httplib::Response& res) {
      send_pendable(res, [this, id = std::string(req.matches[1]), raw = req.body] {
        const Json body = body_of(raw);
        if (!body.contains("text") || !body["text"].is_string()) throw Error(ErrorCode::BadRequest, "body needs 'text'", "text");
        return json_reply(service->instruct(id, body["text"].get<std::string>(), revision_of(body)));
      });
    });
    s.Post(R"(/sessions/([^/]+)/predict)", [this](const httplib::Request& req, httplib::Response& res) {
      send_pendable(res, [this, id = std::string(req.matches[1])] { return json_reply(service->predict(id)); });
    });
    s.Post(R"(/sessions/([^/]+)/proposals/(\d+)/(accept|reject))", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, guarded([&] {
        const std::string id = req.matches[1];
        const auto k = index_of(req.matches[2]);
        return json_reply(req.matches[3] == "accept" ? service->accept_proposal(id, k) : service->reject_proposal(id, k));
      }));
    });
    s.Get(R"(/sessions/([^/]+)/goals/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, guarded([&] { return json_reply(service->goals(req.matches[1], req.matches[2])); }));
    });
    s.Post(R"(/sessions/([^/]+)/goals/([^/]+)/(\d+)/accept)", [this](const httplib::Request& req, httplib::Response& res) {
      send_pendable(res, [this, id = std::string(req.matches[1]), object = std::string(req.matches[2]),
                          k = std::string(req.matches[3]), raw = req.body] {
        return json_reply(service->accept_goal(id, object, index_of(k), revision_of(body_of(raw))));
      });
    });
    s.Get(R"(/sessions/([^/]+)/scene/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, guarded([&] {
        const std::string mode = req.has_param("mode") ? req.get_param_value("mode") : "plain";
        std::optional<int> width;
        if (req.has_param("width")) width = static_cast<int>(index_of(req.get_param_value("width")));
        return Reply{200, service->scene(req.matches[1], index_of(req.matches[2]), mode, width), "image/svg+xml"};
      }));
    });
    s.Post(R"(/sessions/([^/]+)/translate)", [this](const httplib::Request& req, httplib::Response& res) {
      send_pendable(res, [this, id = std::string(req.matches[1]), raw = req.body] {
        const Json body = body_of(raw);
        return json_reply(service->translate(id, body.value("path", std::string("rule"))));
      });
    });
    s.Get(R"(/sessions/([^/]+)/rebase)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, guarded([&] { return json_reply(service->rebase_report(req.matches[1])); }));
    });
    s.Put(R"(/sessions/([^/]+)/archive)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, guarded([&] { return json_reply(service->save_archive(req.matches[1])); }));
    });
    s.Get(R"(/sessions/([^/]+)/archive)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, guarded([&] { return json_reply(service->load_archive(req.matches[1])); }));
    });
    s.Post("/judge", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, guarded([&] {
        const Json body = body_of(req.body);
        // Each side is either a live session id or an inline archive document.
        auto resolve = [&](const char* key) -> Json {
          if (!body.contains(key)) throw Error(ErrorCode::BadRequest, std::string("body needs '") + key + "'", key);
          const Json& v = body[key];
          if (v.is_string()) return serialize_archive(service->archive(v.get<std::string>()));
          return v;
        };
        return json_reply(service->judge(resolve("session"), resolve("oracle")));
      }));
    });
    s.Get(R"(/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      std::shared_future<Reply> job;
      {
        std::lock_guard lock(jobsMutex);
        auto it = jobs.find(id);
        if (it == jobs.end()) {
          send(res, json_reply(error_body(Error(ErrorCode::NotFound, "no job '" + id + "'", id)), 404));
          return;
        }
        job = it->second;
        if (job.wait_for(std::chrono::seconds(0)) == std::future_status::ready) jobs.erase(it);
      }
      if (job.wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
        send(res, json_reply({{"job", id}, {"status", "pending"}}, 202));
        return;
      }
      send(res, job.get());
    });
  }
};

ApiServer::ApiServer(std::shared_ptr<SessionService> service, ApiOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->service = std::move(service);
  impl_->options = options;
  impl_->routes();
}

ApiServer::~ApiServer() {
  stop();
  std::lock_guard lock(impl_->jobsMutex);
  for (auto& [id, job] : impl_->jobs) job.wait();
}

bool ApiServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int ApiServer::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool ApiServer::listen_after_bind() { return impl_->server.listen_after_bind(); }
void ApiServer::wait_until_ready() const { impl_->server.wait_until_ready(); }
void ApiServer::stop() { impl_->server.stop(); }

}  // namespace frameplan::service
