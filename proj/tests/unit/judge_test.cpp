#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <functional>
#include <random>

#include "frameplan/changeset.hpp"
#include "frameplan/error.hpp"
#include "frameplan/judge.hpp"
#include "frameplan/service/archive.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"
#include "test_support.hpp"

namespace frameplan::judge {
namespace {

using testing::add_noop;
using testing::drop_one;
using testing::first_move_change;
using testing::last_move_change;
using testing::oracle_states;

void expect_counts(const ErrorReport& r, std::size_t missing, std::size_t extraneous, std::size_t inefficient,
                   const std::string& what) {
  EXPECT_EQ(r.missing_count(), missing) << what << "\n" << to_json(r).dump();
  EXPECT_EQ(r.extraneous_count(), extraneous) << what << "\n" << to_json(r).dump();
  EXPECT_EQ(r.inefficient_count(), inefficient) << what << "\n" << to_json(r).dump();
}

class TaskPerturbations : public ::testing::TestWithParam<std::string> {};

TEST_P(TaskPerturbations, IdentityIsClean) {
  const Environment& env = *testing::demo_bundle(GetParam()).environment;
  const auto s = oracle_states(GetParam());
  const auto r = judge_sequences(env, s, s);
  EXPECT_TRUE(r.clean());
  EXPECT_EQ(r.matched.size(), s.size() - 1);
}

TEST_P(TaskPerturbations, DropOneIsOneMissing) {
  const Environment& env = *testing::demo_bundle(GetParam()).environment;
  const auto s = oracle_states(GetParam());
  // Later steps never depend on the last move, so leaving it out removes exactly one change.
  const auto p = drop_one(s, last_move_change(s));
  const auto r = judge_sequences(env, p.states, s);
  expect_counts(r, 1, 0, 0, GetParam());
  EXPECT_EQ(r.missing, (std::vector<std::size_t>{p.changeIndex}));
  const auto last = drop_one(s, s.size() - 2);
  expect_counts(judge_sequences(env, last.states, s), 1, 0, 0, GetParam() + " last");
}

TEST_P(TaskPerturbations, AddNoopIsOneExtraneous) {
  const Environment& env = *testing::demo_bundle(GetParam()).environment;
  const auto s = oracle_states(GetParam());
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const auto p = add_noop(s, k);
    const auto r = judge_sequences(env, p.states, s);
    expect_counts(r, 0, 1, 0, GetParam() + " at " + std::to_string(k));
    EXPECT_EQ(r.extraneous, (std::vector<std::size_t>{p.changeIndex}));
  }
}

TEST_P(TaskPerturbations, SplitOneIsOneInefficient) {
  const Environment& env = *testing::demo_bundle(GetParam()).environment;
  const auto s = oracle_states(GetParam());
  const std::size_t k = first_move_change(s);
  const auto p = testing::split_one(env, s, k);
  ASSERT_TRUE(p) << "no detour pose";
  const auto r = judge_sequences(env, p->states, s);
  expect_counts(r, 0, 0, 1, GetParam());
  ASSERT_EQ(r.inefficient.size(), 1u);
  EXPECT_EQ(r.inefficient[0], (InefficientGroup{k, {k, k + 1}}));
}

INSTANTIATE_TEST_SUITE_P(Tasks, TaskPerturbations, ::testing::ValuesIn(testing::kTaskBundles),
                         [](const auto& info) {
                           std::string n = info.param;
                           std::replace(n.begin(), n.end(), '-', '_');
                           return n;
                         });

// The split example: exactly one consecutive run composes to the oracle step.
TEST(Align, BowlCounterEdgeSink) {
  const ChangeSignature direct{{{"bowl", "cell:1,1", "fixture:sink"}}, {}};
  const ChangeSignature toEdge{{{"bowl", "cell:1,1", "cell:0,9"}}, {}};
  const ChangeSignature toSink{{{"bowl", "cell:0,9", "fixture:sink"}}, {}};
  const std::vector<ChangeSignature> participant{toEdge, toSink};
  int composing = 0;
  const RunSignature run = [&](std::size_t a, std::size_t b) {
    const ChangeSignature sig = a == 0 && b == 1 ? direct : ChangeSignature{};
    if (sig == direct) ++composing;
    return sig;
  };
  const auto r = align(participant, {direct}, run);
  EXPECT_EQ(composing, 1);
  expect_counts(r, 0, 0, 1, "bowl");
}

TEST(Signature, RegionLevelEquality) {
  const Bundle& b = testing::demo_bundle("washing-dishes");
  const Environment& env = *b.environment;
  const EnvState s = b.initialState;
  const EnvState inSink1 = apply_object_move(env, s, "cup", Point{300, 150});
  const EnvState inSink2 = apply_object_move(env, s, "cup", Point{305, 150});
  const EnvState inRack = apply_object_move(env, s, "cup", Point{520, 280});
  EXPECT_EQ(signature(env, s, inSink1), signature(env, s, inSink2));
  EXPECT_NE(signature(env, s, inSink1), signature(env, s, inRack));
  const EnvState on = apply_fixture_toggle(env, s, "faucet");
  const auto sig = signature(env, s, on);
  EXPECT_TRUE(sig.moves.empty());
  ASSERT_EQ(sig.fixtures.size(), 1u);
  EXPECT_EQ(sig.fixtures[0], (SignatureFixture{"faucet", "off", "on"}));
}

TEST(Signature, RegionLabels) {
  const Bundle& b = testing::demo_bundle("sorting-fruits");
  const Environment& env = *b.environment;
  EnvState s = apply_object_move(env, b.initialState, "ripe_banana", Point{400, 365});
  EXPECT_EQ(region_label(env, s, "ripe_banana"), "in:bowl_b");
  s = apply_object_move(env, s, "bottle", Point{60, 60});
  EXPECT_EQ(region_label(env, s, "bottle"), "fixture:cabinet");
  s = apply_object_move(env, s, "unripe_banana", Point{600, 10});
  EXPECT_EQ(region_label(env, s, "unripe_banana"), "cell:19,0");
}

TEST(Signature, ForeignStateIsEnvironmentMismatch) {
  const Bundle& a = testing::demo_bundle("washing-dishes");
  const Bundle& b = testing::demo_bundle("red-apple");
  try {
    signature(*a.environment, a.initialState, b.initialState);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EnvironmentMismatch);
  }
  EXPECT_THROW(judge_sequences(*a.environment, {a.initialState}, {b.initialState}), Error);
}

void check_invariants(const ErrorReport& r, std::size_t participant, std::size_t oracle) {
  std::size_t inefficientOracle = r.inefficient.size();
  std::size_t inefficientParticipant = 0;
  for (const auto& g : r.inefficient) inefficientParticipant += g.participantIndices.size();
  ASSERT_EQ(r.missing.size() + r.matched.size() + inefficientOracle, oracle);
  ASSERT_EQ(r.extraneous.size() + r.matched.size() + inefficientParticipant, participant);
  std::vector<int> seen(participant, 0);
  for (const auto& [o, p] : r.matched) ++seen[p];
  for (auto p : r.extraneous) ++seen[p];
  for (const auto& g : r.inefficient) {
    for (auto p : g.participantIndices) ++seen[p];
  }
  for (int c : seen) ASSERT_EQ(c, 1);
}

std::vector<ChangeSignature> decode(std::size_t code, std::size_t len, std::size_t alphabet) {
  std::vector<ChangeSignature> out;
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back(ChangeSignature{{{"o", "cell:0,0", "cell:" + std::to_string(code % alphabet) + ",0"}}, {}});
    code /= alphabet;
  }
  return out;
}

TEST(Lcs, EqualsExhaustiveOverAllShortSequences) {
  // every pair of sequences of length <= 4 over three symbols
  const std::size_t alphabet = 3;
  std::vector<std::vector<ChangeSignature>> all;
  for (std::size_t len = 0; len <= 4; ++len) {
    std::size_t count = 1;
    for (std::size_t i = 0; i < len; ++i) count *= alphabet;
    for (std::size_t c = 0; c < count; ++c) all.push_back(decode(c, len, alphabet));
  }
  for (const auto& p : all) {
    for (const auto& o : all) ASSERT_EQ(lcs_matching(p, o), oracle::exhaustive_lcs(p, o));
  }
}

TEST(Lcs, EqualsExhaustiveOnRandomLengthSix) {
  std::mt19937 rng(99);
  for (int i = 0; i < 3000; ++i) {
    std::vector<ChangeSignature> p, o;
    const int alphabet = 2 + i % 3;
    for (std::size_t k = 0, n = 1 + rng() % 6; k < n; ++k) p.push_back(oracle::random_signature(rng, alphabet));
    for (std::size_t k = 0, n = 1 + rng() % 6; k < n; ++k) o.push_back(oracle::random_signature(rng, alphabet));
    ASSERT_EQ(lcs_matching(p, o), oracle::exhaustive_lcs(p, o));
    const auto r = align(p, o, [](std::size_t, std::size_t) { return ChangeSignature{}; });
    check_invariants(r, p.size(), o.size());
  }
}

TEST(Judge, IdenticalSuffixLeavesCountsUnchanged) {
  const Environment& env = *testing::demo_bundle("washing-dishes").environment;
  const auto s = oracle_states("washing-dishes");
  auto p = drop_one(s, 1).states;
  auto o = s;
  const auto before = judge_sequences(env, p, o);
  EnvState extra = apply_object_move(env, o.back(), "cup", Point{10, 10});
  EnvState extraP = apply_object_move(env, p.back(), "cup", Point{10, 10});
  o.push_back(extra);
  p.push_back(extraP);
  const auto after = judge_sequences(env, p, o);
  EXPECT_EQ(after.missing_count(), before.missing_count());
  EXPECT_EQ(after.extraneous_count(), before.extraneous_count());
  EXPECT_EQ(after.inefficient_count(), before.inefficient_count());
}

TEST(Judge, ReportJsonShape) {
  const Environment& env = *testing::demo_bundle("washing-dishes").environment;
  const auto s = oracle_states("washing-dishes");
  const auto j = to_json(judge_sequences(env, add_noop(s, 0).states, s));
  EXPECT_EQ(j.at("extraneous").at("count"), 1);
  EXPECT_EQ(j.at("extraneous").at("participant"), nlohmann::json::array({1}));
  EXPECT_EQ(j.at("missing").at("count"), 0);
  EXPECT_EQ(j.at("inefficient").at("count"), 0);
  EXPECT_FALSE(j.at("clean").get<bool>());
}

TEST(Judge, FullSuiteRunsQuickly) {
  const auto start = std::chrono::steady_clock::now();
  for (const auto& id : testing::kTaskBundles) {
    const Environment& env = *testing::demo_bundle(id).environment;
    const auto s = oracle_states(id);
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      judge_sequences(env, drop_one(s, k).states, s);
      judge_sequences(env, add_noop(s, k).states, s);
    }
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 10.0);
}

}  // namespace
}  // namespace frameplan::judge
