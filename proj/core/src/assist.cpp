#include "frameplan/assist.hpp"

#include <algorithm>
#include <span>

#include "frameplan/error.hpp"

namespace frameplan {

GoalProposal propose_goals(const Timeline& tl, const std::string& object) {
  const Environment& env = tl.environment();
  if (env.find_object(object) == nullptr) {
    throw Error(ErrorCode::NotManipulable, "'" + object + "' is not a movable object", object);
  }
  auto it = env.goalLocations.find(object);
  if (it == env.goalLocations.end() || it->second.empty()) {
    throw Error(ErrorCode::NotManipulable, "'" + object + "' has no goal candidates", object);
  }
  // A candidate counts as occupied when the object's box already overlaps the box it would
  // have there by more than half.
  const Box current = object_box(env, tl.selected_step().state, object);
  GoalProposal out{object, {}};
  std::copy_if(it->second.begin(), it->second.end(), std::back_inserter(out.candidates), [&](const GoalLocation& g) {
    return coverage(current, Box{g.x, g.y, current.w, current.h}) <= 0.5;
  });
  return out;
}

Timeline accept_goal(const Timeline& tl, const GoalProposal& proposal, std::size_t candidateIndex) {
  if (candidateIndex >= proposal.candidates.size()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "candidate " + std::to_string(candidateIndex) + " of " + std::to_string(proposal.candidates.size()),
                std::to_string(candidateIndex));
  }
  const auto& goal = proposal.candidates[candidateIndex];
  return tl.record_drag(proposal.objectName, Point{goal.x, goal.y});
}

NextStepProposals propose_next_steps(const Timeline& tl, llm::Provider& provider) {
  const Environment& env = tl.environment();
  const std::span<const Step> history(tl.steps().data(), tl.selected() + 1);
  const auto parsed = llm::parse_prediction_response(provider.complete(llm::build_prediction_prompt(env, history)).text);

  NextStepProposals out;
  out.warnings = parsed.warnings;
  const EnvState& base = tl.selected_step().state;
  for (const auto& action : parsed.actions) {
    // The prediction already says which kind of change is needed, so no classify call.
    const auto cls = action.changeNeeded == llm::kChangeBackground ? llm::InstructionClass::FixtureStateChange
                                                                   : llm::InstructionClass::ObjectManipulation;
    try {
      const auto reply = provider.complete(llm::build_state_edit_prompt(env, base, action.action, cls));
      auto states = llm::materialize_deltas(env, base, llm::parse_state_edit_response(env, reply.text));
      EnvState state = std::move(states.back());
      state.caption = action.action;
      out.steps.push_back({action.action, action.changeNeeded, std::move(state), tl.revision()});
    } catch (const Error& e) {
      out.warnings.push_back("dropped proposal '" + action.action + "': " + e.what());
    }
  }
  return out;
}

Timeline accept_plausible(const Timeline& tl, const PlausibleStep& step) {
  if (step.baseRevision != tl.revision()) {
    throw Error(ErrorCode::StaleProposal,
                "proposal was made at revision " + std::to_string(step.baseRevision) + ", timeline is at " +
                    std::to_string(tl.revision()),
                std::to_string(step.baseRevision));
  }
  return tl.insert_states({step.state}, Provenance::Predicted, {step.action});
}

}  // namespace frameplan
