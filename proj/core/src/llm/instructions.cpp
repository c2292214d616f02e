#include "frameplan/llm/instructions.hpp"

#include "frameplan/llm/parsers.hpp"

namespace frameplan::llm {

std::string fixture_caption(std::string_view fixtureName, std::string_view newState) {
  std::string out(fixtureName);
  out += ' ';
  out += newState;
  return out;
}

std::string caption_change(Provider& provider, const Environment& env, const EnvState& current,
                           const EnvState& next) {
  return parse_caption_response(provider.complete(build_caption_prompt(env, current, next)).text);
}

InstructionClass classify_instruction(Provider& provider, const Environment& env, const EnvState& state,
                                      std::string_view text) {
  return parse_class_response(provider.complete(build_classify_prompt(env, state, text)).text);
}

std::vector<EnvState> states_from_instruction(Provider& provider, const Environment& env, const EnvState& state,
                                              std::string_view text) {
  const auto cls = classify_instruction(provider, env, state, text);
  const auto reply = provider.complete(build_state_edit_prompt(env, state, text, cls));
  return materialize_deltas(env, state, parse_state_edit_response(env, reply.text));
}

}  // namespace frameplan::llm
