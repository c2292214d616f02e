#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frameplan/environment.hpp"
#include "frameplan/llm/prompts.hpp"
#include "frameplan/llm/provider.hpp"
#include "frameplan/timeline.hpp"

namespace frameplan::codegen {

enum class Primitive { Pick, Place, Grasp, Ungrasp, TurnOnFaucet, TurnOffFaucet, StackObject };

inline constexpr Primitive kAllPrimitives[] = {
    Primitive::Pick,         Primitive::Place,         Primitive::Grasp,      Primitive::Ungrasp,
    Primitive::TurnOnFaucet, Primitive::TurnOffFaucet, Primitive::StackObject};

std::string_view to_string(Primitive p) noexcept;
std::size_t arity(Primitive p) noexcept;
std::optional<Primitive> primitive_from_string(std::string_view name);

struct SkillCall {
  Primitive primitive = Primitive::Pick;
  std::vector<std::string> args;

  static SkillCall pick(std::string target) { return {Primitive::Pick, {std::move(target)}}; }
  static SkillCall place(std::string target) { return {Primitive::Place, {std::move(target)}}; }
  static SkillCall grasp(std::string target) { return {Primitive::Grasp, {std::move(target)}}; }
  static SkillCall ungrasp() { return {Primitive::Ungrasp, {}}; }
  static SkillCall turn_on_faucet() { return {Primitive::TurnOnFaucet, {}}; }
  static SkillCall turn_off_faucet() { return {Primitive::TurnOffFaucet, {}}; }
  static SkillCall stack_object(std::string source, std::string target) {
    return {Primitive::StackObject, {std::move(source), std::move(target)}};
  }

  friend bool operator==(const SkillCall&, const SkillCall&) = default;
};

struct PolicyProgram {
  std::vector<SkillCall> calls;
  /// Step id (or sequence index) each call was derived from; empty for parsed programs.
  std::vector<std::int64_t> sources;

  friend bool operator==(const PolicyProgram& a, const PolicyProgram& b) {
    return a.calls == b.calls;
  }
};

/// Overlap (fraction of the moved object's box) that counts as containment or stacking.
inline constexpr double kContainmentThreshold = 0.5;

/// Class, plus a positional qualifier when several objects share the class.
std::string describe_target(const Environment& env, const EnvState& state, const std::string& object);

/// Deterministic translation over consecutive ChangeSets.
PolicyProgram translate_rule_based(const Environment& env, const std::vector<EnvState>& states);
PolicyProgram translate_rule_based(const Timeline& tl);

llm::PromptBundle build_codegen_prompt(const Environment& env, const std::vector<EnvState>& states);

/// One `name("arg", ...)` call per line; blank lines and code fences are ignored.
PolicyProgram parse_program(std::string_view text);
std::string emit(const PolicyProgram& program);

PolicyProgram translate_with_model(llm::Provider& provider, const Environment& env,
                                   const std::vector<EnvState>& states);

struct ProgramIssue {
  enum class Kind { UnknownTarget, DanglingPick, PlaceWithoutPick, Extraneous };
  Kind kind;
  std::size_t callIndex = 0;
  std::string message;
};

std::string_view to_string(ProgramIssue::Kind kind) noexcept;

using ProgramReport = std::vector<ProgramIssue>;

ProgramReport validate_program(const Environment& env, const std::vector<EnvState>& states,
                               const PolicyProgram& program);

}  // namespace frameplan::codegen
