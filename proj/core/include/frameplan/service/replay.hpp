#pragma once

#include <string>
#include <vector>

#include "frameplan/bundle.hpp"
#include "frameplan/llm/provider.hpp"
#include "frameplan/service/archive.hpp"

namespace frameplan::service {

struct ReplayOptions {
  bool caption = false;
  bool oracle = false;
};

struct ReplayResult {
  SessionArchive archive;
  std::vector<std::string> warnings;
};

/// Runs a script `{"events": [...]}` headlessly against a fresh session. Event types:
/// drag, toggle, copy, delete, select, reorder, caption, instruct, goal.
ReplayResult run_replay(const Json& script, const Bundle& bundle,
                        std::shared_ptr<llm::Provider> provider, const ReplayOptions& options = {});

}  // namespace frameplan::service
