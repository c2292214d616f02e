#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frameplan/geometry.hpp"

namespace frameplan {

/// A movable item. `image` is a base64 raster mask.
struct ObjectSpec {
  std::string name;
  std::string cls;
  Box boundingBox;
  std::string category;
  bool isReceptacle = false;
  int width = 0;
  int height = 0;
  std::string image;

  friend bool operator==(const ObjectSpec&, const ObjectSpec&) = default;
};

/// An immovable item with discrete states; `boundingBox` is its clickable region.
struct FixtureSpec {
  std::string name;
  std::string cls;
  Box boundingBox;
  std::string category;
  int width = 0;
  int height = 0;
  int x = 0;
  int y = 0;
  std::vector<std::string> possibleStates;

  friend bool operator==(const FixtureSpec&, const FixtureSpec&) = default;
};

struct GoalLocation {
  std::string label;
  int x = 0;
  int y = 0;
  friend bool operator==(const GoalLocation&, const GoalLocation&) = default;
};

/// Canonical `name=state` segments over fixtures sorted by name, joined by ';'.
using BackgroundKey = std::string;
using FixtureStates = std::map<std::string, std::string>;

/// Static description of the robot's workspace.
struct Environment {
  Size canvas;
  std::map<std::string, ObjectSpec> objects;
  std::map<std::string, FixtureSpec> fixtures;
  std::map<BackgroundKey, std::string> backgrounds;
  std::map<std::string, std::vector<GoalLocation>> goalLocations;

  const ObjectSpec* find_object(const std::string& name) const;
  const FixtureSpec* find_fixture(const std::string& name) const;
  const ObjectSpec& object(const std::string& name) const;    // throws UnknownObject
  const FixtureSpec& fixture(const std::string& name) const;  // throws UnknownFixture

  friend bool operator==(const Environment&, const Environment&) = default;
};

/// One snapshot of the transient scene state.
struct EnvState {
  std::string caption;
  std::map<std::string, Point> objectPoses;
  FixtureStates fixtureStates;
  std::vector<std::string> objectOrder;  // first entry is drawn furthest back

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

struct Violation {
  std::string code;
  std::string path;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate_environment(const Environment& env);
ValidationReport validate_state(const Environment& env, const EnvState& state);

/// Throws InvalidState listing the first violation when `state` does not belong to `env`.
void require_valid_state(const Environment& env, const EnvState& state);

BackgroundKey background_key(const Environment& env, const FixtureStates& fixtureStates);

/// Every fixture-state combination of `env`, in lexicographic order of fixture names then states.
std::vector<FixtureStates> fixture_state_combinations(const Environment& env);

const std::string& resolve_background(const Environment& env, const EnvState& state);

EnvState apply_object_move(const Environment& env, const EnvState& state, const std::string& name,
                           Point to);
EnvState apply_object_move(const Environment& env, const EnvState& state, const std::string& name,
                           double x, double y);
EnvState apply_fixture_toggle(const Environment& env, const EnvState& state,
                              const std::string& name);

/// The next entry of the fixture's possibleStates after `current`, wrapping around.
const std::string& next_fixture_state(const FixtureSpec& fixture, const std::string& current);

/// The object's bounding box at its pose in `state`.
Box object_box(const Environment& env, const EnvState& state, const std::string& name);

/// Click resolution: objects (top-most first) win over fixture regions.
struct HitTarget {
  enum class Kind { Object, Fixture } kind;
  std::string name;
};
std::optional<HitTarget> hit_test(const Environment& env, const EnvState& state, Point p);

}  // namespace frameplan
