#include "frameplan/judge.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "frameplan/changeset.hpp"
#include "frameplan/error.hpp"

namespace frameplan::judge {
namespace {

void require_same_environment(const Environment& env, const EnvState& state) {
  const auto report = validate_state(env, state);
  if (!report.empty()) {
    throw Error(ErrorCode::EnvironmentMismatch, "state does not belong to the environment: " + report.front().message,
                report.front().path);
  }
}

/// Smallest-area candidate containing `p`; ties go to the lower name.
template <typename Boxes>
const std::string* smallest_containing(const Boxes& candidates, Point p) {
  const std::string* best = nullptr;
  std::int64_t bestArea = 0;
  for (const auto& [name, box] : candidates) {
    if (!box.contains(p)) continue;
    if (best == nullptr || box.area() < bestArea) {
      best = &name;
      bestArea = box.area();
    }
  }
  return best;
}

}  // namespace

std::string region_label(const Environment& env, const EnvState& state, const std::string& object) {
  env.object(object);
  const Box box = object_box(env, state, object);
  const Point centre = box.center();

  std::vector<std::pair<std::string, Box>> receptacles;
  for (const auto& [name, spec] : env.objects) {
    if (name != object && spec.isReceptacle) receptacles.emplace_back(name, object_box(env, state, name));
  }
  if (const auto* r = smallest_containing(receptacles, centre)) return "in:" + *r;

  std::vector<std::pair<std::string, Box>> fixtures;
  for (const auto& [name, f] : env.fixtures) fixtures.emplace_back(name, f.boundingBox);
  if (const auto* f = smallest_containing(fixtures, centre)) return "fixture:" + *f;

  if (auto it = env.goalLocations.find(object); it != env.goalLocations.end()) {
    const Point pose = state.objectPoses.at(object);
    for (const auto& goal : it->second) {
      if (std::hypot(pose.x - goal.x, pose.y - goal.y) <= kGoalRadius) return "goal:" + goal.label;
    }
  }
  return "cell:" + std::to_string(centre.x / kGridCell) + "," + std::to_string(centre.y / kGridCell);
}

ChangeSignature signature(const Environment& env, const EnvState& prevState, const EnvState& state) {
  require_same_environment(env, prevState);
  require_same_environment(env, state);
  const ChangeSet cs = diff(prevState, state);
  ChangeSignature sig;
  for (const auto& m : cs.movedObjects) {
    sig.moves.push_back({m.name, region_label(env, prevState, m.name), region_label(env, state, m.name)});
  }
  for (const auto& f : cs.fixtureChanges) sig.fixtures.push_back({f.name, f.from, f.to});
  std::sort(sig.moves.begin(), sig.moves.end());
  std::sort(sig.fixtures.begin(), sig.fixtures.end());
  return sig;
}

std::map<std::size_t, std::size_t> lcs_matching(const std::vector<ChangeSignature>& participant,
                                                const std::vector<ChangeSignature>& oracle) {
  const std::size_t n = participant.size();
  const std::size_t m = oracle.size();
  // suffix[i][j] = LCS length of participant[i..] and oracle[j..]
  std::vector<std::vector<std::size_t>> suffix(n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      suffix[i][j] = participant[i] == oracle[j] ? suffix[i + 1][j + 1] + 1
                                                 : std::max(suffix[i + 1][j], suffix[i][j + 1]);
    }
  }
  // Walking forward and matching as soon as it stays optimal picks the lexicographically
  // smallest participant list; skipping oracle steps first keeps early participants available.
  std::vector<std::size_t> chosen;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n && j < m) {
    if (participant[i] == oracle[j] && suffix[i][j] == suffix[i + 1][j + 1] + 1) {
      chosen.push_back(i++);
      ++j;
    } else if (suffix[i][j] == suffix[i][j + 1]) {
      ++j;
    } else {
      ++i;
    }
  }
  // That walk may bind to a later oracle step than needed. Re-embedding the chosen steps at
  // the earliest oracle positions always succeeds and makes the oracle side canonical too.
  std::map<std::size_t, std::size_t> out;
  j = 0;
  for (std::size_t p : chosen) {
    while (!(oracle[j] == participant[p])) ++j;
    out[j++] = p;
  }
  return out;
}

ErrorReport align(const std::vector<ChangeSignature>& participant, const std::vector<ChangeSignature>& oracle,
                  const RunSignature& runSignature) {
  ErrorReport report;
  report.matched = lcs_matching(participant, oracle);

  std::vector<bool> used(participant.size(), false);
  for (const auto& [o, p] : report.matched) used[p] = true;

  for (std::size_t o = 0; o < oracle.size(); ++o) {
    if (report.matched.count(o) > 0) continue;
    // Only participant steps between the neighbouring matches keep the order intact.
    std::size_t lo = 0;
    std::size_t hi = participant.size();
    for (const auto& [mo, mp] : report.matched) {
      if (mo < o) lo = mp + 1;
      if (mo > o) {
        hi = mp;
        break;
      }
    }
    for (const auto& g : report.inefficient) {
      if (g.oracleIndex < o) lo = std::max(lo, g.participantIndices.back() + 1);
    }
    bool found = false;
    // Earliest start first, then the shortest run; single steps were already ruled out by the LCS.
    for (std::size_t a = lo; a < hi && !found; ++a) {
      if (used[a]) continue;
      for (std::size_t b = a + 1; b < hi && !used[b]; ++b) {
        if (runSignature(a, b) == oracle[o]) {
          InefficientGroup group{o, {}};
          for (std::size_t k = a; k <= b; ++k) {
            used[k] = true;
            group.participantIndices.push_back(k);
          }
          report.inefficient.push_back(std::move(group));
          found = true;
          break;
        }
      }
    }
    if (!found) report.missing.push_back(o);
  }
  for (std::size_t p = 0; p < participant.size(); ++p) {
    if (!used[p]) report.extraneous.push_back(p);
  }
  return report;
}

ErrorReport judge_sequences(const Environment& env, const std::vector<EnvState>& participant,
                            const std::vector<EnvState>& oracle) {
  if (participant.empty() || oracle.empty()) {
    throw Error(ErrorCode::InvalidSequence, "both sequences need their initial state");
  }
  for (const auto& s : participant) require_same_environment(env, s);
  for (const auto& s : oracle) require_same_environment(env, s);
  EnvState a = participant.front();
  EnvState b = oracle.front();
  a.caption.clear();
  b.caption.clear();
  if (a != b) throw Error(ErrorCode::EnvironmentMismatch, "participant and oracle start from different states");

  auto signatures = [&](const std::vector<EnvState>& states) {
    std::vector<ChangeSignature> out;
    for (std::size_t i = 1; i < states.size(); ++i) out.push_back(signature(env, states[i - 1], states[i]));
    return out;
  };
  // Change k runs from state k to state k + 1, so a run [first, last] spans states first..last + 1.
  return align(signatures(participant), signatures(oracle), [&](std::size_t first, std::size_t last) {
    return signature(env, participant[first], participant[last + 1]);
  });
}

nlohmann::json to_json(const ErrorReport& report) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : report.inefficient) {
    groups.push_back({{"oracle", g.oracleIndex}, {"participant", g.participantIndices}});
  }
  nlohmann::json matched = nlohmann::json::array();
  for (const auto& [o, p] : report.matched) matched.push_back({{"oracle", o}, {"participant", p}});
  return {{"missing", {{"count", report.missing_count()}, {"oracle", report.missing}}},
          {"extraneous", {{"count", report.extraneous_count()}, {"participant", report.extraneous}}},
          {"inefficient", {{"count", report.inefficient_count()}, {"groups", groups}}},
          {"matched", matched},
          {"clean", report.clean()}};
}

}  // namespace frameplan::judge
