#include "frameplan/bundle.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "frameplan/digest.hpp"
#include "frameplan/error.hpp"

namespace frameplan {
namespace fs = std::filesystem;
namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string(), path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_file_ref(const std::string& value) {
  return value.size() > 4 && value.compare(value.size() - 4, 4, ".png") == 0;
}

// Base64 never contains '.', so a `.png` suffix always names a file.
void inline_rasters(Json& doc, const fs::path& dir) {
  auto inline_field = [&](Json& field) {
    if (field.is_string() && is_file_ref(field.get<std::string>())) {
      field = base64_encode(read_file(dir / field.get<std::string>()));
    }
  };
  if (auto it = doc.find("objects"); it != doc.end() && it->is_object()) {
    for (auto& item : it->items()) {
      if (item.value().is_object() && item.value().contains("image")) inline_field(item.value()["image"]);
    }
  }
  if (auto it = doc.find("backgrounds"); it != doc.end() && it->is_object()) {
    for (auto& item : it->items()) inline_field(item.value());
  }
}

}  // namespace

Bundle load_bundle(const fs::path& dir) {
  const auto manifestPath = dir / "manifest.json";
  Json doc = parse_document(read_file(manifestPath), manifestPath.string());
  if (!doc.is_object()) throw Error(ErrorCode::SchemaError, "manifest must be an object", "manifest");

  Bundle bundle;
  bundle.id = doc.value("id", dir.filename().string());
  if (!doc.contains("initialState")) {
    throw Error(ErrorCode::SchemaError, "manifest.initialState: missing field", "manifest.initialState");
  }
  Json initial = doc["initialState"];
  doc.erase("id");
  doc.erase("initialState");
  inline_rasters(doc, dir);

  auto env = std::make_shared<Environment>(deserialize_environment(doc));
  bundle.initialState = deserialize_state(*env, initial);
  bundle.environment = std::move(env);
  return bundle;
}

Json bundle_manifest(const Bundle& bundle) {
  Json doc = serialize_environment(*bundle.environment);
  doc["id"] = bundle.id;
  doc["initialState"] = serialize_state(bundle.initialState);
  return doc;
}

BundleCatalog::BundleCatalog(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw Error(ErrorCode::IoError, "bundle directory " + root.string() + " does not exist", root.string());
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) add(load_bundle(dir));
}

void BundleCatalog::add(Bundle bundle) {
  if (!bundle.environment) throw Error(ErrorCode::ValidationFailed, "bundle '" + bundle.id + "' has no environment", bundle.id);
  if (const auto report = validate_environment(*bundle.environment); !report.empty()) {
    throw Error(ErrorCode::ValidationFailed, "bundle '" + bundle.id + "': " + report.front().message, report.front().path);
  }
  auto id = bundle.id;
  bundles_.insert_or_assign(std::move(id), std::move(bundle));
}

const Bundle* BundleCatalog::find(const std::string& id) const {
  auto it = bundles_.find(id);
  return it == bundles_.end() ? nullptr : &it->second;
}

std::vector<std::string> BundleCatalog::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, bundle] : bundles_) out.push_back(id);
  return out;
}

}  // namespace frameplan
