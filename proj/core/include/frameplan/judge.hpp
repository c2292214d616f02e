#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "frameplan/environment.hpp"

namespace frameplan::judge {

/// Grid pitch for poses that fall in no named region.
inline constexpr int kGridCell = 32;
/// A drop within this many pixels of a goal candidate's anchor lands in that goal region.
inline constexpr int kGoalRadius = 16;

/// A move is summarised by the regions it leaves and enters, so a detour through a third
/// region splits into two moves that each differ from the direct one.
struct SignatureMove {
  std::string object;
  std::string from;
  std::string to;
  friend bool operator==(const SignatureMove&, const SignatureMove&) = default;
  friend auto operator<=>(const SignatureMove&, const SignatureMove&) = default;
};

struct SignatureFixture {
  std::string fixture;
  std::string from;
  std::string to;
  friend bool operator==(const SignatureFixture&, const SignatureFixture&) = default;
  friend auto operator<=>(const SignatureFixture&, const SignatureFixture&) = default;
};

/// Region-level summary of a change; pixel jitter inside one region does not affect it.
struct ChangeSignature {
  std::vector<SignatureMove> moves;
  std::vector<SignatureFixture> fixtures;

  bool empty() const { return moves.empty() && fixtures.empty(); }
  friend bool operator==(const ChangeSignature&, const ChangeSignature&) = default;
};

std::string region_label(const Environment& env, const EnvState& state, const std::string& object);

ChangeSignature signature(const Environment& env, const EnvState& prevState, const EnvState& state);

struct InefficientGroup {
  std::size_t oracleIndex = 0;
  std::vector<std::size_t> participantIndices;
  friend bool operator==(const InefficientGroup&, const InefficientGroup&) = default;
};

struct ErrorReport {
  std::vector<std::size_t> missing;       // oracle indices
  std::vector<std::size_t> extraneous;    // participant indices
  std::vector<InefficientGroup> inefficient;
  std::map<std::size_t, std::size_t> matched;  // oracle index -> participant index

  std::size_t missing_count() const { return missing.size(); }
  std::size_t extraneous_count() const { return extraneous.size(); }
  std::size_t inefficient_count() const { return inefficient.size(); }
  bool clean() const { return missing.empty() && extraneous.empty() && inefficient.empty(); }
};

nlohmann::json to_json(const ErrorReport& report);

/// Signature of participant steps [first, last] composed into one change.
using RunSignature = std::function<ChangeSignature(std::size_t first, std::size_t last)>;

/// Order-preserving LCS matching, then inefficient-run recovery, then leftovers.
ErrorReport align(const std::vector<ChangeSignature>& participant,
                  const std::vector<ChangeSignature>& oracle, const RunSignature& runSignature);

/// LCS step only: oracle index -> participant index, ties toward earliest participant steps.
std::map<std::size_t, std::size_t> lcs_matching(const std::vector<ChangeSignature>& participant,
                                                const std::vector<ChangeSignature>& oracle);

/// Judges two state sequences (each starting with the shared initial snapshot).
ErrorReport judge_sequences(const Environment& env, const std::vector<EnvState>& participant,
                            const std::vector<EnvState>& oracle);

}  // namespace frameplan::judge
