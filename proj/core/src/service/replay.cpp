#include "frameplan/service/replay.hpp"

#include "frameplan/error.hpp"
#include "frameplan/service/session_service.hpp"

namespace frameplan::service {

ReplayResult run_replay(const Json& script, const Bundle& bundle, std::shared_ptr<llm::Provider> provider,
                        const ReplayOptions& options) {
  if (!script.is_object() || !script.contains("events") || !script["events"].is_array()) {
    throw Error(ErrorCode::SchemaError, "replay script needs an 'events' list", "events");
  }
  BundleCatalog catalog;
  catalog.add(bundle);
  // Replays go through the service so scripted events mean exactly what API events mean.
  SessionService service(std::move(catalog), std::move(provider), ServiceOptions{{}, options.caption});
  const std::string id = service.create_session(bundle.id)["sessionId"].get<std::string>();

  std::vector<std::string> warnings;
  const Json& events = script["events"];
  for (std::size_t k = 0; k < events.size(); ++k) {
    const Json& event = events[k];
    const std::string type = event.is_object() ? event.value("type", std::string{}) : std::string{};
    Json reply;
    try {
      if (type == "caption") {
        reply = service.edit_caption(id, event.at("index").get<std::size_t>(), event.at("text").get<std::string>(),
                                     event.value("linked", true), std::nullopt);
      } else if (type == "instruct") {
        reply = service.instruct(id, event.at("text").get<std::string>(), std::nullopt);
      } else if (type == "goal") {
        reply = service.accept_goal(id, event.at("object").get<std::string>(), event.at("candidate").get<std::size_t>(),
                                    std::nullopt);
      } else {
        reply = service.post_event(id, std::nullopt, event);
      }
    } catch (const Error& e) {
      throw Error(e.code(), "event " + std::to_string(k) + " (" + type + "): " + e.what(), e.detail());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SchemaError, "event " + std::to_string(k) + " (" + type + "): " + e.what(),
                  "events[" + std::to_string(k) + "]");
    }
    for (const auto& w : reply.value("warnings", Json::array())) {
      warnings.push_back("event " + std::to_string(k) + ": " + w.get<std::string>());
    }
  }

  SessionArchive archive = service.archive(id);
  archive.sessionId = script.value("session", bundle.id + "-replay");
  archive.oracle = options.oracle;
  return ReplayResult{std::move(archive), std::move(warnings)};
}

}  // namespace frameplan::service
