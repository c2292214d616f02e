#include "frameplan/llm/prompts.hpp"

#include <array>
#include <mutex>

#include "frameplan/digest.hpp"
#include "frameplan/error.hpp"
#include "frameplan/serialization.hpp"

namespace frameplan::llm {
namespace assets {
struct EmbeddedAsset {
  std::string_view name;
  std::string_view bytes;
};
extern const std::array<EmbeddedAsset, 6> kEmbeddedAssets;
}  // namespace assets

namespace {

std::string_view asset_name(PromptKind kind) {
  switch (kind) {
    case PromptKind::Caption: return "caption";
    case PromptKind::Classify: return "classify";
    case PromptKind::StateEdit: return "state_edit";
    case PromptKind::PredictSteps: return "predict_steps";
    case PromptKind::ProgramSummary: return "program_summary";
    case PromptKind::CodeGen: return "codegen";
  }
  return "caption";
}

std::string state_payload(const EnvState& state) { return serialize_state(state).dump(); }

std::string env_payload(const Environment& env) { return environment_prompt_document(env).dump(); }

std::vector<Attachment> step_attachments(const Environment& env, std::span<const Step> steps) {
  std::vector<Attachment> out{{std::string(kEnvironmentLabel), env_payload(env)}};
  for (std::size_t i = 0; i < steps.size(); ++i) {
    EnvState state = steps[i].state;
    state.caption = steps[i].caption;
    out.push_back({step_label(i + 1), state_payload(state)});
  }
  return out;
}

}  // namespace

std::string_view to_string(PromptKind kind) noexcept { return asset_name(kind); }

PromptKind prompt_kind_from_string(std::string_view text) {
  for (auto kind : kAllPromptKinds) {
    if (asset_name(kind) == text) return kind;
  }
  throw Error(ErrorCode::BadRequest, "unknown prompt kind '" + std::string(text) + "'", std::string(text));
}

std::string_view to_string(InstructionClass c) noexcept {
  return c == InstructionClass::FixtureStateChange ? "FixtureStateChange" : "ObjectManipulation";
}

std::string_view prompt_template(PromptKind kind) {
  const auto name = asset_name(kind);
  for (const auto& asset : assets::kEmbeddedAssets) {
    if (asset.name == name) return asset.bytes;
  }
  throw Error(ErrorCode::NotFound, "prompt template '" + std::string(name) + "' is not embedded");
}

std::string prompt_template_hash(PromptKind kind) {
  static std::once_flag once;
  static std::array<std::string, std::size(kAllPromptKinds)> hashes;
  std::call_once(once, [] {
    for (std::size_t i = 0; i < hashes.size(); ++i) hashes[i] = sha256_hex(prompt_template(kAllPromptKinds[i]));
  });
  return hashes[static_cast<std::size_t>(kind)];
}

std::string PromptBundle::digest() const {
  std::string material(to_string(kind));
  material += '\n';
  for (const auto& a : attachments) {
    material += a.label;
    material += '\n';
    material += std::to_string(a.payload.size());
    material += '\n';
    material += a.payload;
    material += '\n';
  }
  return sha256_hex(material);
}

std::string PromptBundle::user_text() const {
  std::string out;
  for (const auto& a : attachments) {
    if (!out.empty()) out += "\n\n";
    out += a.label;
    out += ": ";
    out += a.payload;
  }
  return out;
}

std::string step_label(std::size_t oneBasedIndex) { return "[Step (" + std::to_string(oneBasedIndex) + ")]"; }

PromptBundle make_bundle(PromptKind kind, std::vector<Attachment> attachments) {
  return PromptBundle{kind, std::string(prompt_template(kind)), std::move(attachments), prompt_template_hash(kind)};
}

PromptBundle build_caption_prompt(const Environment& env, const EnvState& current, const EnvState& next) {
  return make_bundle(PromptKind::Caption, {{std::string(kEnvironmentLabel), env_payload(env)},
                                           {std::string(kCurrentStateLabel), state_payload(current)},
                                           {std::string(kNextStateLabel), state_payload(next)}});
}

PromptBundle build_classify_prompt(const Environment& env, const EnvState& state, std::string_view instruction) {
  return make_bundle(PromptKind::Classify, {{std::string(kEnvironmentLabel), env_payload(env)},
                                            {std::string(kCurrentStateLabel), state_payload(state)},
                                            {std::string(kInstructionLabel), std::string(instruction)}});
}

PromptBundle build_state_edit_prompt(const Environment& env, const EnvState& state, std::string_view instruction,
                                     InstructionClass cls) {
  return make_bundle(PromptKind::StateEdit, {{std::string(kEnvironmentLabel), env_payload(env)},
                                             {std::string(kCurrentStateLabel), state_payload(state)},
                                             {std::string(kInstructionClassLabel), std::string(to_string(cls))},
                                             {std::string(kInstructionLabel), std::string(instruction)}});
}

PromptBundle build_prediction_prompt(const Environment& env, std::span<const Step> steps) {
  if (steps.empty()) throw Error(ErrorCode::InvalidSequence, "prediction needs at least one step");
  return make_bundle(PromptKind::PredictSteps, step_attachments(env, steps));
}

PromptBundle build_program_prompt(const Environment& env, std::span<const Step> steps) {
  if (steps.size() < 2) throw Error(ErrorCode::InvalidSequence, "a program summary needs at least two steps");
  return make_bundle(PromptKind::ProgramSummary, step_attachments(env, steps));
}

}  // namespace frameplan::llm
