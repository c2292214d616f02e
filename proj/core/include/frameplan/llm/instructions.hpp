#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "frameplan/environment.hpp"
#include "frameplan/llm/provider.hpp"

namespace frameplan::llm {

/// "<fixture> <state>", used for toggle steps instead of a model call.
std::string fixture_caption(std::string_view fixtureName, std::string_view newState);

std::string caption_change(Provider& provider, const Environment& env, const EnvState& current,
                           const EnvState& next);

InstructionClass classify_instruction(Provider& provider, const Environment& env,
                                      const EnvState& state, std::string_view text);

/// Classify, request a state edit, and materialize one snapshot per returned delta.
std::vector<EnvState> states_from_instruction(Provider& provider, const Environment& env,
                                              const EnvState& state, std::string_view text);

}  // namespace frameplan::llm
