#include "frameplan/service/archive.hpp"

#include <fstream>
#include <memory>
#include <sstream>

#include "frameplan/error.hpp"

namespace frameplan::service {
namespace {

const Json& field(const Json& doc, const char* key, const std::string& path) {
  auto it = doc.find(key);
  if (it == doc.end()) throw Error(ErrorCode::SchemaError, "missing field " + path + key, path + key);
  return *it;
}

template <typename T>
T typed(const Json& doc, const char* key, const std::string& path = "") {
  const Json& v = field(doc, key, path);
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::SchemaError, "field " + path + key + " has the wrong type", path + key);
  }
}

}  // namespace

Json serialize_archive(const SessionArchive& archive) {
  const Timeline& tl = archive.timeline;
  Json steps = Json::array();
  for (const auto& s : tl.steps()) {
    steps.push_back({{"id", s.id},
                     {"provenance", to_string(s.provenance)},
                     {"caption", s.caption},
                     {"linked", s.linked},
                     {"state", serialize_state(s.state)}});
  }
  return {{"format", kArchiveFormat},
          {"sessionId", archive.sessionId},
          {"bundle", archive.bundleId},
          {"oracle", archive.oracle},
          {"environment", serialize_environment(tl.environment())},
          {"revision", tl.revision()},
          {"selected", tl.selected()},
          {"nextId", tl.next_id()},
          {"steps", std::move(steps)}};
}

SessionArchive deserialize_archive(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::SchemaError, "archive must be an object", "");
  if (typed<std::string>(doc, "format") != kArchiveFormat) {
    throw Error(ErrorCode::SchemaError, "unsupported archive format", "format");
  }
  auto env = std::make_shared<const Environment>(deserialize_environment(field(doc, "environment", "")));
  std::vector<Step> steps;
  const Json& list = field(doc, "steps", "");
  if (!list.is_array()) throw Error(ErrorCode::SchemaError, "steps must be a list", "steps");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "steps[" + std::to_string(i) + "].";
    const Json& s = list[i];
    if (!s.is_object()) throw Error(ErrorCode::SchemaError, "step must be an object", path);
    Step step;
    step.id = typed<std::int64_t>(s, "id", path);
    step.provenance = provenance_from_string(typed<std::string>(s, "provenance", path));
    step.caption = typed<std::string>(s, "caption", path);
    step.linked = typed<bool>(s, "linked", path);
    step.state = deserialize_state(*env, field(s, "state", path));
    steps.push_back(std::move(step));
  }
  SessionArchive out{typed<std::string>(doc, "sessionId"), typed<std::string>(doc, "bundle"),
                     doc.contains("oracle") ? typed<bool>(doc, "oracle") : false,
                     Timeline::restore(env, std::move(steps), typed<std::size_t>(doc, "selected"),
                                       typed<std::uint64_t>(doc, "revision"), typed<std::int64_t>(doc, "nextId"))};
  return out;
}

SessionArchive read_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string(), path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize_archive(parse_document(buf.str(), path.string()));
}

void write_archive(const std::filesystem::path& path, const SessionArchive& archive) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // Write then rename so a crash never leaves a truncated archive behind.
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string(), tmp.string());
    out << serialize_archive(archive).dump(2) << '\n';
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string(), tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<EnvState> archive_states(const SessionArchive& archive) {
  std::vector<EnvState> out;
  for (const auto& s : archive.timeline.steps()) out.push_back(s.state);
  return out;
}

}  // namespace frameplan::service
