#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frameplan/environment.hpp"
#include "frameplan/timeline.hpp"

namespace frameplan::llm {

enum class PromptKind { Caption, Classify, StateEdit, PredictSteps, ProgramSummary, CodeGen };

inline constexpr PromptKind kAllPromptKinds[] = {
    PromptKind::Caption,        PromptKind::Classify, PromptKind::StateEdit,
    PromptKind::PredictSteps,   PromptKind::ProgramSummary, PromptKind::CodeGen};

std::string_view to_string(PromptKind kind) noexcept;
PromptKind prompt_kind_from_string(std::string_view text);

enum class InstructionClass { FixtureStateChange, ObjectManipulation };
std::string_view to_string(InstructionClass c) noexcept;

/// Template assets are embedded byte-for-byte at build time.
std::string_view prompt_template(PromptKind kind);
std::string prompt_template_hash(PromptKind kind);  // sha256 hex
inline constexpr std::string_view kTemplateVersion = "1";

struct Attachment {
  std::string label;
  std::string payload;
  friend bool operator==(const Attachment&, const Attachment&) = default;
};

struct PromptBundle {
  PromptKind kind = PromptKind::Caption;
  std::string system;
  std::vector<Attachment> attachments;
  std::string templateHash;

  /// Digest of kind and attachments; keys mock transcripts.
  std::string digest() const;
  /// Attachments rendered as `label: payload` blocks separated by blank lines.
  std::string user_text() const;
};

inline constexpr std::string_view kEnvironmentLabel = "[Environment]";
inline constexpr std::string_view kCurrentStateLabel = "[Current Environment State]";
inline constexpr std::string_view kNextStateLabel = "[Next Environment State]";
inline constexpr std::string_view kInstructionLabel = "[Instruction]";
inline constexpr std::string_view kInstructionClassLabel = "[Instruction Type]";

/// `[Step (i)]` with i starting at 1.
std::string step_label(std::size_t oneBasedIndex);

PromptBundle make_bundle(PromptKind kind, std::vector<Attachment> attachments);

PromptBundle build_caption_prompt(const Environment& env, const EnvState& current,
                                  const EnvState& next);
PromptBundle build_classify_prompt(const Environment& env, const EnvState& state,
                                   std::string_view instruction);
PromptBundle build_state_edit_prompt(const Environment& env, const EnvState& state,
                                     std::string_view instruction, InstructionClass cls);
PromptBundle build_prediction_prompt(const Environment& env, std::span<const Step> steps);
PromptBundle build_program_prompt(const Environment& env, std::span<const Step> steps);

}  // namespace frameplan::llm
