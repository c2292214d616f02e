#include "frameplan/environment.hpp"

#include <algorithm>
#include <set>

#include "frameplan/error.hpp"

namespace frameplan {
namespace {

bool has_reserved_char(const std::string& s) {
  return s.find_first_of("=;") != std::string::npos;
}

std::string box_text(const Box& b) {
  return "[" + std::to_string(b.x) + ", " + std::to_string(b.y) + ", " + std::to_string(b.w) +
         ", " + std::to_string(b.h) + "]";
}

void check_box(ValidationReport& report, const std::string& path, const Box& box, Size canvas) {
  if (box.w <= 0 || box.h <= 0) {
    report.push_back({"nonpositive-size", path + ".boundingBox",
                      "bounding box " + box_text(box) + " has non-positive extent"});
  } else if (!box.within(canvas)) {
    report.push_back({"out-of-bounds", path + ".boundingBox",
                      "bounding box " + box_text(box) + " leaves the canvas"});
  }
}

}  // namespace

const ObjectSpec* Environment::find_object(const std::string& name) const {
  auto it = objects.find(name);
  return it == objects.end() ? nullptr : &it->second;
}

const FixtureSpec* Environment::find_fixture(const std::string& name) const {
  auto it = fixtures.find(name);
  return it == fixtures.end() ? nullptr : &it->second;
}

const ObjectSpec& Environment::object(const std::string& name) const {
  if (const auto* o = find_object(name)) return *o;
  throw Error(ErrorCode::UnknownObject, "unknown object '" + name + "'", name);
}

const FixtureSpec& Environment::fixture(const std::string& name) const {
  if (const auto* f = find_fixture(name)) return *f;
  throw Error(ErrorCode::UnknownFixture, "unknown fixture '" + name + "'", name);
}

ValidationReport validate_environment(const Environment& env) {
  ValidationReport report;
  if (env.canvas.width <= 0 || env.canvas.height <= 0) {
    report.push_back({"nonpositive-size", "canvas", "canvas must have positive width and height"});
  }

  for (const auto& [key, object] : env.objects) {
    const std::string path = "objects." + key;
    if (key.empty()) report.push_back({"empty-name", path, "object name is empty"});
    if (object.name != key) {
      report.push_back({"name-mismatch", path, "object '" + object.name + "' stored under '" + key + "'"});
    }
    check_box(report, path, object.boundingBox, env.canvas);
    if (object.width != object.boundingBox.w || object.height != object.boundingBox.h) {
      report.push_back({"size-mismatch", path,
                        "width/height must equal the bounding box extent"});
    }
    if (env.fixtures.count(key) != 0) {
      report.push_back({"duplicate-name", path, "'" + key + "' names both an object and a fixture"});
    }
  }

  for (const auto& [key, fixture] : env.fixtures) {
    const std::string path = "fixtures." + key;
    if (key.empty()) report.push_back({"empty-name", path, "fixture name is empty"});
    if (fixture.name != key) {
      report.push_back({"name-mismatch", path, "fixture '" + fixture.name + "' stored under '" + key + "'"});
    }
    if (has_reserved_char(key)) {
      report.push_back({"reserved-character", path, "fixture names may not contain '=' or ';'"});
    }
    check_box(report, path, fixture.boundingBox, env.canvas);
    if (fixture.possibleStates.empty()) {
      report.push_back({"empty-states", path + ".possibleStates", "fixture has no states"});
    }
    std::set<std::string> seen;
    for (const auto& state : fixture.possibleStates) {
      if (!seen.insert(state).second) {
        report.push_back({"duplicate-state", path + ".possibleStates", "state '" + state + "' repeats"});
      }
      if (state.empty() || has_reserved_char(state)) {
        report.push_back({"reserved-character", path + ".possibleStates",
                          "state '" + state + "' is empty or contains '=' or ';'"});
      }
    }
  }

  bool statesUsable = std::all_of(env.fixtures.begin(), env.fixtures.end(),
                                   [](const auto& kv) { return !kv.second.possibleStates.empty(); });
  if (statesUsable) {
    std::set<BackgroundKey> expected;
    for (const auto& combo : fixture_state_combinations(env)) {
      BackgroundKey key;
      for (const auto& [name, state] : combo) {
        if (!key.empty()) key += ';';
        key += name + '=' + state;
      }
      expected.insert(key);
      if (env.backgrounds.count(key) == 0) {
        report.push_back({"missing-background", "backgrounds", "no background for '" + key + "'"});
      }
    }
    for (const auto& [key, image] : env.backgrounds) {
      if (expected.count(key) == 0) {
        report.push_back({"unexpected-background", "backgrounds." + key,
                          "background '" + key + "' matches no fixture-state combination"});
      }
    }
  }

  for (const auto& [name, goals] : env.goalLocations) {
    const std::string path = "goalLocations." + name;
    if (env.objects.count(name) == 0) {
      report.push_back({"unknown-goal-object", path, "goal locations for unknown object '" + name + "'"});
    }
    for (const auto& goal : goals) {
      if (!in_canvas({goal.x, goal.y}, env.canvas)) {
        report.push_back({"goal-out-of-bounds", path, "goal '" + goal.label + "' lies outside the canvas"});
      }
    }
  }
  return report;
}

ValidationReport validate_state(const Environment& env, const EnvState& state) {
  ValidationReport report;
  for (const auto& [name, pose] : state.objectPoses) {
    if (env.objects.count(name) == 0) {
      report.push_back({"unknown-object", "objects." + name, "state places unknown object '" + name + "'"});
    } else if (!in_canvas(pose, env.canvas)) {
      report.push_back({"out-of-bounds", "objects." + name, "pose of '" + name + "' lies outside the canvas"});
    }
  }
  for (const auto& [name, object] : env.objects) {
    if (state.objectPoses.count(name) == 0) {
      report.push_back({"missing-object", "objects." + name, "state has no pose for '" + name + "'"});
    }
  }
  for (const auto& [name, value] : state.fixtureStates) {
    const auto* fixture = env.find_fixture(name);
    if (fixture == nullptr) {
      report.push_back({"unknown-fixture", "fixtures." + name, "state sets unknown fixture '" + name + "'"});
    } else if (std::find(fixture->possibleStates.begin(), fixture->possibleStates.end(), value) ==
               fixture->possibleStates.end()) {
      report.push_back({"illegal-state", "fixtures." + name + ".state",
                        "'" + value + "' is not a state of '" + name + "'"});
    }
  }
  for (const auto& [name, fixture] : env.fixtures) {
    if (state.fixtureStates.count(name) == 0) {
      report.push_back({"missing-fixture", "fixtures." + name, "state has no entry for fixture '" + name + "'"});
    }
  }
  std::vector<std::string> order = state.objectOrder;
  std::sort(order.begin(), order.end());
  std::vector<std::string> names;
  for (const auto& [name, object] : env.objects) names.push_back(name);
  if (order != names) {
    report.push_back({"bad-object-order", "objectOrder", "objectOrder is not a permutation of the objects"});
  }
  return report;
}

void require_valid_state(const Environment& env, const EnvState& state) {
  auto report = validate_state(env, state);
  if (!report.empty()) {
    throw Error(ErrorCode::InvalidState, report.front().message, report.front().path);
  }
}

BackgroundKey background_key(const Environment& env, const FixtureStates& fixtureStates) {
  BackgroundKey key;
  for (const auto& [name, state] : fixtureStates) {  // std::map iterates in sorted order
    const auto& fixture = env.fixture(name);
    if (std::find(fixture.possibleStates.begin(), fixture.possibleStates.end(), state) ==
        fixture.possibleStates.end()) {
      throw Error(ErrorCode::IllegalState, "'" + state + "' is not a state of '" + name + "'",
                  name + "=" + state);
    }
    if (!key.empty()) key += ';';
    key += name;
    key += '=';
    key += state;
  }
  return key;
}

std::vector<FixtureStates> fixture_state_combinations(const Environment& env) {
  std::vector<FixtureStates> combos{FixtureStates{}};
  for (const auto& [name, fixture] : env.fixtures) {
    std::vector<FixtureStates> next;
    next.reserve(combos.size() * fixture.possibleStates.size());
    for (const auto& partial : combos) {
      for (const auto& state : fixture.possibleStates) {
        auto extended = partial;
        extended[name] = state;
        next.push_back(std::move(extended));
      }
    }
    combos = std::move(next);
  }
  return combos;
}

const std::string& resolve_background(const Environment& env, const EnvState& state) {
  for (const auto& [name, fixture] : env.fixtures) {
    if (state.fixtureStates.count(name) == 0) {
      throw Error(ErrorCode::InvalidState, "state has no entry for fixture '" + name + "'", name);
    }
  }
  const auto key = background_key(env, state.fixtureStates);
  auto it = env.backgrounds.find(key);
  if (it == env.backgrounds.end()) {
    throw Error(ErrorCode::MissingBackground, "no background for '" + key + "'", key);
  }
  return it->second;
}

EnvState apply_object_move(const Environment& env, const EnvState& state, const std::string& name,
                           Point to) {
  if (env.find_object(name) == nullptr || state.objectPoses.count(name) == 0) {
    throw Error(ErrorCode::UnknownObject, "unknown object '" + name + "'", name);
  }
  if (!in_canvas(to, env.canvas)) {
    throw Error(ErrorCode::OutOfBounds,
                "(" + std::to_string(to.x) + ", " + std::to_string(to.y) + ") lies outside the canvas",
                name);
  }
  EnvState next = state;
  next.objectPoses[name] = to;
  return next;
}

EnvState apply_object_move(const Environment& env, const EnvState& state, const std::string& name,
                           double x, double y) {
  return apply_object_move(env, state, name, Point{round_half_up(x), round_half_up(y)});
}

const std::string& next_fixture_state(const FixtureSpec& fixture, const std::string& current) {
  const auto& states = fixture.possibleStates;
  auto it = std::find(states.begin(), states.end(), current);
  if (it == states.end()) {
    throw Error(ErrorCode::IllegalState, "'" + current + "' is not a state of '" + fixture.name + "'",
                fixture.name);
  }
  ++it;
  return it == states.end() ? states.front() : *it;
}

EnvState apply_fixture_toggle(const Environment& env, const EnvState& state, const std::string& name) {
  const auto& fixture = env.fixture(name);
  auto current = state.fixtureStates.find(name);
  if (current == state.fixtureStates.end()) {
    throw Error(ErrorCode::UnknownFixture, "state has no entry for fixture '" + name + "'", name);
  }
  EnvState next = state;
  next.fixtureStates[name] = next_fixture_state(fixture, current->second);
  return next;
}

Box object_box(const Environment& env, const EnvState& state, const std::string& name) {
  const auto& object = env.object(name);
  auto pose = state.objectPoses.find(name);
  if (pose == state.objectPoses.end()) {
    throw Error(ErrorCode::UnknownObject, "state has no pose for '" + name + "'", name);
  }
  return {pose->second.x, pose->second.y, object.boundingBox.w, object.boundingBox.h};
}

std::optional<HitTarget> hit_test(const Environment& env, const EnvState& state, Point p) {
  for (auto it = state.objectOrder.rbegin(); it != state.objectOrder.rend(); ++it) {
    if (object_box(env, state, *it).contains(p)) return HitTarget{HitTarget::Kind::Object, *it};
  }
  const FixtureSpec* best = nullptr;
  for (const auto& [name, fixture] : env.fixtures) {
    if (!fixture.boundingBox.contains(p)) continue;
    if (best == nullptr || fixture.boundingBox.area() < best->boundingBox.area()) best = &fixture;
  }
  if (best != nullptr) return HitTarget{HitTarget::Kind::Fixture, best->name};
  return std::nullopt;
}

}  // namespace frameplan
