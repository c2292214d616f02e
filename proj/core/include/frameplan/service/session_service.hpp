#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "frameplan/assist.hpp"
#include "frameplan/bundle.hpp"
#include "frameplan/llm/provider.hpp"
#include "frameplan/serialization.hpp"
#include "frameplan/service/archive.hpp"
#include "frameplan/timeline.hpp"

namespace frameplan::service {

/// Committed view of a session; immutable once published.
struct SessionSnapshot {
  Timeline timeline;
  std::vector<PlausibleStep> proposals;
  std::uint64_t proposalRevision = 0;
};

/// One editing session. Mutations serialize through the writer lock and publish a new
/// snapshot; readers never block on the writer.
class Session {
 public:
  Session(std::string id, std::string bundleId, Timeline timeline);

  const std::string& id() const { return id_; }
  const std::string& bundle_id() const { return bundleId_; }
  std::shared_ptr<const SessionSnapshot> snapshot() const;

  /// Runs `mutate` on the latest snapshot under the writer lock. When `expectedRevision`
  /// is set and differs from the committed revision, throws RevisionConflict. Any
  /// exception leaves the session unchanged.
  template <typename Mutate>
  std::shared_ptr<const SessionSnapshot> commit(std::optional<std::uint64_t> expectedRevision,
                                                Mutate&& mutate);

 private:
  void check_revision(const SessionSnapshot& current, std::optional<std::uint64_t> expected) const;
  void publish(std::shared_ptr<const SessionSnapshot> next);

  std::string id_;
  std::string bundleId_;
  mutable std::mutex writer_;
  mutable std::mutex publish_;
  std::shared_ptr<const SessionSnapshot> committed_;
};

template <typename Mutate>
std::shared_ptr<const SessionSnapshot> Session::commit(std::optional<std::uint64_t> expectedRevision,
                                                       Mutate&& mutate) {
  std::lock_guard writer(writer_);
  auto current = snapshot();
  check_revision(*current, expectedRevision);
  auto next = std::make_shared<const SessionSnapshot>(mutate(*current));
  publish(next);
  return next;
}

struct ServiceOptions {
  std::filesystem::path dataDir = "data";
  bool autoCaption = true;
};

/// Session lifecycle and every API operation, independent of transport. Results are the
/// structured documents the HTTP layer returns verbatim.
class SessionService {
 public:
  SessionService(BundleCatalog catalog, std::shared_ptr<llm::Provider> provider,
                 ServiceOptions options = {});

  const BundleCatalog& catalog() const { return catalog_; }
  llm::Provider& provider() const { return *provider_; }
  std::shared_ptr<Session> session(const std::string& id) const;  // throws NotFound

  Json create_session(const std::string& bundleId);
  Json create_session_from_archive(const Json& archive);
  Json describe(const std::string& id) const;

  /// `event` carries `type` in drag|toggle|copy|delete|select|reorder plus its fields.
  Json post_event(const std::string& id, std::optional<std::uint64_t> revision, const Json& event);
  Json edit_caption(const std::string& id, std::size_t index, std::string text, bool linked,
                    std::optional<std::uint64_t> revision);
  Json instruct(const std::string& id, const std::string& text,
                std::optional<std::uint64_t> revision);
  Json predict(const std::string& id);
  Json accept_proposal(const std::string& id, std::size_t k);
  Json reject_proposal(const std::string& id, std::size_t k);
  Json goals(const std::string& id, const std::string& object) const;
  Json accept_goal(const std::string& id, const std::string& object, std::size_t candidate,
                   std::optional<std::uint64_t> revision);
  std::string scene(const std::string& id, std::size_t index, const std::string& mode,
                    std::optional<int> width) const;
  Json translate(const std::string& id, const std::string& path) const;
  Json rebase_report(const std::string& id) const;
  Json judge(const Json& participantArchive, const Json& oracleArchive) const;

  Json save_archive(const std::string& id) const;
  /// Reads the saved archive; a session that is not live is brought back under its id.
  Json load_archive(const std::string& id);
  SessionArchive archive(const std::string& id) const;

 private:
  std::string next_session_id();
  std::shared_ptr<Session> add_session(std::string bundleId, Timeline timeline,
                                       std::optional<std::string> id = std::nullopt);
  std::vector<std::string> caption_new_steps(const Timeline& before, Timeline& after) const;
  std::filesystem::path archive_path(const std::string& id) const;

  BundleCatalog catalog_;
  std::shared_ptr<llm::Provider> provider_;
  ServiceOptions options_;
  mutable std::mutex sessionsMutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

/// Step summary used by every API response that returns steps.
Json step_summary(const Timeline& tl, std::size_t index);
Json timeline_summary(const Timeline& tl);

}  // namespace frameplan::service
