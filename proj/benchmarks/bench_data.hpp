#pragma once

#include <map>
#include <mutex>
#include <string>

#include "frameplan/bundle.hpp"

namespace frameplan::bench {

inline const Bundle& bundle(const std::string& id) {
  static std::mutex mutex;
  static std::map<std::string, Bundle> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(id);
  if (it == cache.end()) it = cache.emplace(id, load_bundle(std::string(FRAMEPLAN_BENCH_BUNDLE_DIR) + "/" + id)).first;
  return it->second;
}

}  // namespace frameplan::bench
