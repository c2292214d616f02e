#pragma once

#include <filesystem>
#include <string>

#include "frameplan/serialization.hpp"
#include "frameplan/timeline.hpp"

namespace frameplan::service {

inline constexpr std::string_view kArchiveFormat = "frameplan.session/1";

/// A saved timeline session. Oracle files are archives with `oracle` set.
struct SessionArchive {
  std::string sessionId;
  std::string bundleId;
  bool oracle = false;
  Timeline timeline;
};

Json serialize_archive(const SessionArchive& archive);
SessionArchive deserialize_archive(const Json& doc);

SessionArchive read_archive(const std::filesystem::path& path);
void write_archive(const std::filesystem::path& path, const SessionArchive& archive);

/// The snapshots of every step, initial state first.
std::vector<EnvState> archive_states(const SessionArchive& archive);

}  // namespace frameplan::service
