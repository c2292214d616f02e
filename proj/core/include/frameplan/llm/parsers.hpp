#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "frameplan/environment.hpp"
#include "frameplan/llm/prompts.hpp"

namespace frameplan::llm {

// Every parser accepts arbitrary bytes and either returns a value or throws a typed Error.

/// Removes a surrounding ``` fence and a leading `json` token.
std::string strip_code_fences(std::string_view text);

/// First non-empty line after the last `[Instruction]:` marker, unquoted and trimmed.
std::string parse_caption_response(std::string_view text);

InstructionClass parse_class_response(std::string_view text);

/// One model-proposed edit. Either map may be empty, not both.
struct StateDelta {
  FixtureStates fixtures;
  std::map<std::string, Point> poses;
  friend bool operator==(const StateDelta&, const StateDelta&) = default;
};

std::vector<StateDelta> parse_state_edit_response(const Environment& env, std::string_view text);

/// Applies deltas cumulatively from `start`, one snapshot per delta.
std::vector<EnvState> materialize_deltas(const Environment& env, const EnvState& start,
                                         const std::vector<StateDelta>& deltas);

inline constexpr std::string_view kChangeBackground = "Change background";
inline constexpr std::string_view kMoveObjects = "Move objects";

struct PredictedAction {
  std::string action;
  std::string changeNeeded;  // kChangeBackground or kMoveObjects
  friend bool operator==(const PredictedAction&, const PredictedAction&) = default;
};

struct PredictionParse {
  std::vector<PredictedAction> actions;  // 1 or 2 entries
  std::vector<std::string> warnings;
};

PredictionParse parse_prediction_response(std::string_view text);

/// The documented response body: a list of {"action", "change_needed"} dictionaries.
std::string serialize_prediction_body(const std::vector<PredictedAction>& actions);

/// Text after the last `[Response]` marker, trimmed.
std::string parse_program_summary(std::string_view text);

}  // namespace frameplan::llm
