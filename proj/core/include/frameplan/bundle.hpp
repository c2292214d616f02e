#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "frameplan/environment.hpp"
#include "frameplan/serialization.hpp"

namespace frameplan {

/// A prebuilt environment plus the initial snapshot it ships with.
struct Bundle {
  std::string id;
  std::shared_ptr<const Environment> environment;
  EnvState initialState;
};

/// Loads `<dir>/manifest.json`. Image fields ending in `.png` are read relative to `dir`
/// and inlined as base64; any other string is taken as inline base64.
Bundle load_bundle(const std::filesystem::path& dir);

/// Manifest document (environment schema plus `id` and `initialState`) with all rasters inline.
Json bundle_manifest(const Bundle& bundle);

/// Bundles discovered one directory level below a root, keyed by id.
class BundleCatalog {
 public:
  BundleCatalog() = default;
  explicit BundleCatalog(const std::filesystem::path& root);

  void add(Bundle bundle);  // throws ValidationFailed for an invalid environment
  const Bundle* find(const std::string& id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, Bundle> bundles_;
};

}  // namespace frameplan
