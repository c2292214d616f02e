#include <gtest/gtest.h>

#include "frameplan/assist.hpp"
#include "frameplan/error.hpp"
#include "test_support.hpp"

namespace frameplan {
namespace {

Timeline bundle_timeline(const std::string& id) {
  const Bundle& b = testing::demo_bundle(id);
  return Timeline::init(b.environment, b.initialState);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

TEST(Goals, OffersEveryUnoccupiedCandidate) {
  const Timeline tl = bundle_timeline("washing-dishes");
  const GoalProposal p = propose_goals(tl, "plate");
  ASSERT_EQ(p.candidates.size(), 2u);
  EXPECT_EQ(p.candidates[0].label, "sink");
  EXPECT_EQ(p.candidates[1].label, "rack");
}

TEST(Goals, OccupiedCandidateIsFiltered) {
  const Timeline tl = bundle_timeline("red-apple").record_drag("red_apple", Point{445, 305});
  EXPECT_TRUE(propose_goals(tl, "red_apple").candidates.empty());
  const Timeline far = bundle_timeline("red-apple").record_drag("red_apple", Point{420, 240});
  EXPECT_EQ(propose_goals(far, "red_apple").candidates.size(), 1u);
}

TEST(Goals, FixturesAndUnknownNamesAreNotManipulable) {
  const Timeline tl = bundle_timeline("washing-dishes");
  EXPECT_EQ(code_of([&] { propose_goals(tl, "faucet"); }), ErrorCode::NotManipulable);
  EXPECT_EQ(code_of([&] { propose_goals(tl, "teapot"); }), ErrorCode::NotManipulable);
  const Timeline donut = bundle_timeline("donut-stack");
  EXPECT_EQ(code_of([&] { propose_goals(donut, "spoon_1"); }), ErrorCode::NotManipulable);
}

TEST(Goals, AcceptBehavesLikeDrag) {
  const Timeline tl = bundle_timeline("washing-dishes");
  const GoalProposal p = propose_goals(tl, "plate");
  const Timeline once = accept_goal(tl, p, 0);
  ASSERT_EQ(once.size(), 2u);
  EXPECT_EQ(once.step(1).state.objectPoses.at("plate"), (Point{270, 140}));
  EXPECT_EQ(once, tl.record_drag("plate", Point{270, 140}));
  const Timeline twice = accept_goal(once, propose_goals(once, "plate"), 0);
  EXPECT_EQ(twice.size(), 2u);
  EXPECT_EQ(twice.step(1).state.objectPoses.at("plate"), (Point{480, 270}));
  EXPECT_EQ(code_of([&] { accept_goal(tl, p, 5); }), ErrorCode::IndexOutOfRange);
}

struct PredictionSetup {
  Timeline tl;
  llm::MockProvider mock;
};

void register_prediction(PredictionSetup& s, const std::string& body) {
  const Environment& env = s.tl.environment();
  std::span<const Step> history(s.tl.steps().data(), s.tl.selected() + 1);
  s.mock.add_transcript(llm::build_prediction_prompt(env, history), "[Summary] ...\n[Reasoning] ...\n[Response]\n" + body);
}

void register_edit(PredictionSetup& s, const std::string& action, llm::InstructionClass cls, const std::string& reply) {
  s.mock.add_transcript(llm::build_state_edit_prompt(s.tl.environment(), s.tl.selected_step().state, action, cls),
                        reply);
}

TEST(NextSteps, TwoValidActionsGiveTwoProposals) {
  PredictionSetup s{bundle_timeline("sorting-fruits"), {}};
  register_prediction(s, R"([{"action": "Open the cabinet", "change_needed": "Change background"},
                             {"action": "Put the ripe banana in the green bowl", "change_needed": "Move objects"}])");
  register_edit(s, "Open the cabinet", llm::InstructionClass::FixtureStateChange,
                R"([{"fixtures": {"cabinet": "open"}}])");
  register_edit(s, "Put the ripe banana in the green bowl", llm::InstructionClass::ObjectManipulation,
                R"([{"objects": {"ripe_banana": {"x": 400, "y": 365}}}])");
  const auto out = propose_next_steps(s.tl, s.mock);
  ASSERT_EQ(out.steps.size(), 2u);
  EXPECT_TRUE(out.warnings.empty());
  EXPECT_EQ(out.steps[0].state.fixtureStates.at("cabinet"), "open");
  EXPECT_EQ(out.steps[1].state.objectPoses.at("ripe_banana"), (Point{400, 365}));
  EXPECT_EQ(out.steps[1].baseRevision, s.tl.revision());

  const Timeline accepted = accept_plausible(s.tl, out.steps[1]);
  ASSERT_EQ(accepted.size(), 2u);
  EXPECT_EQ(accepted.step(1).provenance, Provenance::Predicted);
  EXPECT_EQ(accepted.step(1).caption, "Put the ripe banana in the green bowl");
}

TEST(NextSteps, UnknownItemDropsOnlyThatProposal) {
  PredictionSetup s{bundle_timeline("sorting-fruits"), {}};
  register_prediction(s, R"([{"action": "Put the pear in the blue bowl", "change_needed": "Move objects"},
                             {"action": "Open the cabinet", "change_needed": "Change background"}])");
  register_edit(s, "Put the pear in the blue bowl", llm::InstructionClass::ObjectManipulation,
                R"([{"objects": {"pear": {"x": 250, "y": 350}}}])");
  register_edit(s, "Open the cabinet", llm::InstructionClass::FixtureStateChange,
                R"([{"fixtures": {"cabinet": "open"}}])");
  const auto out = propose_next_steps(s.tl, s.mock);
  ASSERT_EQ(out.steps.size(), 1u);
  EXPECT_EQ(out.steps[0].action, "Open the cabinet");
  ASSERT_EQ(out.warnings.size(), 1u);
  EXPECT_NE(out.warnings[0].find("pear"), std::string::npos);
}

TEST(NextSteps, ProviderFailurePropagatesAndTimelineIsUntouched) {
  PredictionSetup s{bundle_timeline("sorting-fruits"), {}};
  const Timeline before = s.tl;
  EXPECT_EQ(code_of([&] { propose_next_steps(s.tl, s.mock); }), ErrorCode::TranscriptMissing);
  EXPECT_EQ(s.tl, before);
}

TEST(NextSteps, AcceptAfterInterveningEditIsStale) {
  PredictionSetup s{bundle_timeline("sorting-fruits"), {}};
  register_prediction(s, R"([{"action": "Open the cabinet", "change_needed": "Change background"}])");
  register_edit(s, "Open the cabinet", llm::InstructionClass::FixtureStateChange,
                R"([{"fixtures": {"cabinet": "open"}}])");
  const auto out = propose_next_steps(s.tl, s.mock);
  ASSERT_EQ(out.steps.size(), 1u);
  const Timeline moved = s.tl.record_drag("bottle", Point{60, 60});
  EXPECT_EQ(code_of([&] { accept_plausible(moved, out.steps[0]); }), ErrorCode::StaleProposal);
  reject_plausible(out.steps[0]);
  EXPECT_EQ(accept_plausible(s.tl, out.steps[0]).size(), s.tl.size() + 1);
}

}  // namespace
}  // namespace frameplan
