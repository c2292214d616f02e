#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frameplan/environment.hpp"
#include "frameplan/llm/parsers.hpp"
#include "frameplan/llm/provider.hpp"
#include "frameplan/timeline.hpp"

namespace frameplan {

struct GoalProposal {
  std::string objectName;
  std::vector<GoalLocation> candidates;
};

/// Precomputed goal candidates for `object`, minus those it already occupies (box overlap
/// above one half) in the selected step. NotManipulable when `object` is not an object or
/// has no goal entry.
GoalProposal propose_goals(const Timeline& tl, const std::string& object);

/// Same effect (and coalescing) as dragging to the candidate.
Timeline accept_goal(const Timeline& tl, const GoalProposal& proposal, std::size_t candidateIndex);

/// A model-suggested next step, materialized but not yet in the timeline.
struct PlausibleStep {
  std::string action;
  std::string changeNeeded;
  EnvState state;
  std::uint64_t baseRevision = 0;
};

struct NextStepProposals {
  std::vector<PlausibleStep> steps;  // at most 2
  std::vector<std::string> warnings;
};

/// Predicts from the steps up to the selected one. Prediction-call failures propagate;
/// proposals that fail to materialize are dropped with a warning.
NextStepProposals propose_next_steps(const Timeline& tl, llm::Provider& provider);

/// Inserts after the selected step with provenance `predicted`. StaleProposal when the
/// timeline revision moved since the proposal was made.
Timeline accept_plausible(const Timeline& tl, const PlausibleStep& step);

/// Discarding a proposal has no effect on any timeline.
inline void reject_plausible(const PlausibleStep&) {}

}  // namespace frameplan
