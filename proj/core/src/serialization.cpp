#include "frameplan/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "frameplan/error.hpp"

namespace frameplan {
namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaError, path + ": " + what, path);
}

const Json& require(const Json& doc, const char* key, const std::string& path) {
  auto it = doc.find(key);
  if (it == doc.end()) schema_error(path + "." + key, "missing field");
  return *it;
}

void require_object(const Json& doc, const std::string& path) {
  if (!doc.is_object()) schema_error(path, "expected an object");
}

void reject_unknown(const Json& doc, std::initializer_list<const char*> allowed, const std::string& path) {
  for (const auto& item : doc.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; })) {
      schema_error(path + "." + item.key(), "unknown field");
    }
  }
}

int as_int(const Json& v, const std::string& path) {
  if (v.is_number_integer()) {
    const auto n = v.get<std::int64_t>();
    if (n < INT32_MIN || n > INT32_MAX) schema_error(path, "number out of range");
    return static_cast<int>(n);
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (!std::isfinite(d) || std::abs(d) > 1e9) schema_error(path, "number out of range");
    return round_half_up(d);
  }
  schema_error(path, "expected a number");
}

std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) schema_error(path, "expected a string");
  return v.get<std::string>();
}

bool as_bool(const Json& v, const std::string& path) {
  if (!v.is_boolean()) schema_error(path, "expected a boolean");
  return v.get<bool>();
}

Box as_box(const Json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 4) schema_error(path, "expected [x, y, w, h]");
  return {as_int(v[0], path + "[0]"), as_int(v[1], path + "[1]"), as_int(v[2], path + "[2]"),
          as_int(v[3], path + "[3]")};
}

Json box_json(const Box& b) { return Json::array({b.x, b.y, b.w, b.h}); }

}  // namespace

Json parse_document(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError,
                std::string(source) + ": parse error at byte " + std::to_string(e.byte),
                std::to_string(e.byte));
  }
}

Json serialize_object(const ObjectSpec& o) {
  return Json{{"class", o.cls},           {"boundingBox", box_json(o.boundingBox)},
              {"category", o.category},   {"isReceptacle", o.isReceptacle},
              {"width", o.width},         {"height", o.height},
              {"image", o.image}};
}

Json serialize_fixture(const FixtureSpec& f) {
  return Json{{"class", f.cls},       {"boundingBox", box_json(f.boundingBox)},
              {"category", f.category}, {"width", f.width},
              {"height", f.height},   {"x", f.x},
              {"y", f.y},             {"possibleStates", f.possibleStates}};
}

Json serialize_environment(const Environment& env) {
  Json objects = Json::object();
  for (const auto& [name, o] : env.objects) objects[name] = serialize_object(o);
  Json fixtures = Json::object();
  for (const auto& [name, f] : env.fixtures) fixtures[name] = serialize_fixture(f);
  Json backgrounds = Json::object();
  for (const auto& [key, image] : env.backgrounds) backgrounds[key] = image;
  Json goals = Json::object();
  for (const auto& [name, list] : env.goalLocations) {
    Json entries = Json::array();
    for (const auto& g : list) entries.push_back(Json{{"label", g.label}, {"x", g.x}, {"y", g.y}});
    goals[name] = std::move(entries);
  }
  return Json{{"canvas", Json{{"width", env.canvas.width}, {"height", env.canvas.height}}},
              {"objects", std::move(objects)},
              {"fixtures", std::move(fixtures)},
              {"backgrounds", std::move(backgrounds)},
              {"goalLocations", std::move(goals)}};
}

Json serialize_state(const EnvState& s) {
  Json objects = Json::object();
  for (const auto& [name, p] : s.objectPoses) objects[name] = Json{{"x", p.x}, {"y", p.y}};
  Json fixtures = Json::object();
  for (const auto& [name, state] : s.fixtureStates) fixtures[name] = Json{{"state", state}};
  return Json{{"caption", s.caption},
              {"objects", std::move(objects)},
              {"fixtures", std::move(fixtures)},
              {"objectOrder", s.objectOrder}};
}

ObjectSpec deserialize_object(const std::string& name, const Json& doc, const std::string& base) {
  const std::string path = base + "." + name;
  require_object(doc, path);
  reject_unknown(doc, {"class", "boundingBox", "category", "isReceptacle", "width", "height", "image"}, path);
  ObjectSpec o;
  o.name = name;
  o.cls = as_string(require(doc, "class", path), path + ".class");
  o.boundingBox = as_box(require(doc, "boundingBox", path), path + ".boundingBox");
  o.category = as_string(require(doc, "category", path), path + ".category");
  o.isReceptacle = as_bool(require(doc, "isReceptacle", path), path + ".isReceptacle");
  o.width = as_int(require(doc, "width", path), path + ".width");
  o.height = as_int(require(doc, "height", path), path + ".height");
  o.image = as_string(require(doc, "image", path), path + ".image");
  return o;
}

FixtureSpec deserialize_fixture(const std::string& name, const Json& doc, const std::string& base) {
  const std::string path = base + "." + name;
  require_object(doc, path);
  reject_unknown(doc, {"class", "boundingBox", "category", "width", "height", "x", "y", "possibleStates"}, path);
  FixtureSpec f;
  f.name = name;
  f.cls = as_string(require(doc, "class", path), path + ".class");
  f.boundingBox = as_box(require(doc, "boundingBox", path), path + ".boundingBox");
  f.category = as_string(require(doc, "category", path), path + ".category");
  f.width = as_int(require(doc, "width", path), path + ".width");
  f.height = as_int(require(doc, "height", path), path + ".height");
  f.x = as_int(require(doc, "x", path), path + ".x");
  f.y = as_int(require(doc, "y", path), path + ".y");
  const auto& states = require(doc, "possibleStates", path);
  if (!states.is_array()) schema_error(path + ".possibleStates", "expected a list of strings");
  for (std::size_t i = 0; i < states.size(); ++i) {
    f.possibleStates.push_back(as_string(states[i], path + ".possibleStates[" + std::to_string(i) + "]"));
  }
  return f;
}

Environment deserialize_environment(const Json& doc) {
  require_object(doc, "environment");
  reject_unknown(doc, {"canvas", "objects", "fixtures", "backgrounds", "goalLocations"}, "environment");
  Environment env;
  const auto& canvas = require(doc, "canvas", "environment");
  require_object(canvas, "canvas");
  reject_unknown(canvas, {"width", "height"}, "canvas");
  env.canvas = {as_int(require(canvas, "width", "canvas"), "canvas.width"),
                as_int(require(canvas, "height", "canvas"), "canvas.height")};

  const auto& objects = require(doc, "objects", "environment");
  require_object(objects, "objects");
  for (const auto& item : objects.items()) {
    env.objects.emplace(item.key(), deserialize_object(item.key(), item.value()));
  }
  const auto& fixtures = require(doc, "fixtures", "environment");
  require_object(fixtures, "fixtures");
  for (const auto& item : fixtures.items()) {
    env.fixtures.emplace(item.key(), deserialize_fixture(item.key(), item.value()));
  }
  const auto& backgrounds = require(doc, "backgrounds", "environment");
  require_object(backgrounds, "backgrounds");
  for (const auto& item : backgrounds.items()) {
    env.backgrounds.emplace(item.key(), as_string(item.value(), "backgrounds." + item.key()));
  }
  {
    const auto& goals = require(doc, "goalLocations", "environment");
    require_object(goals, "goalLocations");
    for (const auto& item : goals.items()) {
      const std::string path = "goalLocations." + item.key();
      if (!item.value().is_array()) schema_error(path, "expected a list");
      auto& list = env.goalLocations[item.key()];
      for (std::size_t i = 0; i < item.value().size(); ++i) {
        const auto& g = item.value()[i];
        const std::string gp = path + "[" + std::to_string(i) + "]";
        require_object(g, gp);
        reject_unknown(g, {"label", "x", "y"}, gp);
        list.push_back({as_string(require(g, "label", gp), gp + ".label"),
                        as_int(require(g, "x", gp), gp + ".x"), as_int(require(g, "y", gp), gp + ".y")});
      }
    }
  }
  return env;
}

EnvState deserialize_state(const Json& doc) {
  require_object(doc, "state");
  reject_unknown(doc, {"caption", "objects", "fixtures", "objectOrder"}, "state");
  EnvState s;
  s.caption = as_string(require(doc, "caption", "state"), "state.caption");
  const auto& objects = require(doc, "objects", "state");
  require_object(objects, "state.objects");
  for (const auto& item : objects.items()) {
    const std::string path = "state.objects." + item.key();
    require_object(item.value(), path);
    reject_unknown(item.value(), {"x", "y"}, path);
    s.objectPoses[item.key()] = {as_int(require(item.value(), "x", path), path + ".x"),
                                 as_int(require(item.value(), "y", path), path + ".y")};
  }
  const auto& fixtures = require(doc, "fixtures", "state");
  require_object(fixtures, "state.fixtures");
  for (const auto& item : fixtures.items()) {
    const std::string path = "state.fixtures." + item.key();
    require_object(item.value(), path);
    reject_unknown(item.value(), {"state"}, path);
    s.fixtureStates[item.key()] = as_string(require(item.value(), "state", path), path + ".state");
  }
  const auto& order = require(doc, "objectOrder", "state");
  if (!order.is_array()) schema_error("state.objectOrder", "expected a list of names");
  for (std::size_t i = 0; i < order.size(); ++i) {
    s.objectOrder.push_back(as_string(order[i], "state.objectOrder[" + std::to_string(i) + "]"));
  }
  return s;
}

EnvState deserialize_state(const Environment& env, const Json& doc) {
  EnvState s = deserialize_state(doc);
  auto report = validate_state(env, s);
  if (!report.empty()) {
    throw Error(ErrorCode::SchemaError, "state." + report.front().path + ": " + report.front().message,
                "state." + report.front().path);
  }
  return s;
}

Json environment_prompt_document(const Environment& env) {
  Json doc = serialize_environment(env);
  for (auto& item : doc["objects"].items()) item.value()["image"] = "image://" + item.key();
  Json keys = Json::array();
  for (const auto& [key, image] : env.backgrounds) keys.push_back(key);
  doc.erase("backgrounds");
  doc["backgroundStates"] = std::move(keys);
  return doc;
}

}  // namespace frameplan
