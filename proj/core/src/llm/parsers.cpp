#include "frameplan/llm/parsers.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "frameplan/error.hpp"
#include "frameplan/serialization.hpp"

namespace frameplan::llm {
namespace {

constexpr std::string_view kWhitespace = " \t\r\n";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(kWhitespace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kWhitespace);
  return s.substr(first, last - first + 1);
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }
bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

/// Text following the last occurrence of `marker`, or nullopt when absent.
std::optional<std::string_view> after_last(std::string_view text, std::string_view marker) {
  const auto pos = text.rfind(marker);
  if (pos == std::string_view::npos) return std::nullopt;
  return text.substr(pos + marker.size());
}

std::string strip_quotes(std::string_view s) {
  static constexpr std::pair<std::string_view, std::string_view> kPairs[] = {
      {"\"", "\""}, {"'", "'"}, {"``", "''"}, {"\xE2\x80\x9C", "\xE2\x80\x9D"}, {"\xE2\x80\x98", "\xE2\x80\x99"}, {"`", "`"}};
  bool changed = true;
  while (changed) {
    changed = false;
    s = trim(s);
    for (const auto& [open, close] : kPairs) {
      if (s.size() >= open.size() + close.size() && starts_with(s, open) && ends_with(s, close)) {
        s = s.substr(open.size(), s.size() - open.size() - close.size());
        changed = true;
        break;
      }
    }
  }
  return std::string(s);
}

/// First balanced JSON value of the wanted type found anywhere in `text`.
std::optional<Json> extract_json(std::string_view text, bool wantArray) {
  const char open = wantArray ? '[' : '{';
  for (std::size_t start = text.find_first_of("[{"); start != std::string_view::npos;
       start = text.find_first_of("[{", start + 1)) {
    if (text[start] != open && !(wantArray && text[start] == '{')) continue;
    // Scan to the matching close bracket, respecting strings.
    int depth = 0;
    bool inString = false;
    bool escaped = false;
    std::size_t end = std::string_view::npos;
    for (std::size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (inString) {
        if (escaped) escaped = false;
        else if (c == '\\') escaped = true;
        else if (c == '"') inString = false;
        continue;
      }
      if (c == '"') inString = true;
      else if (c == '[' || c == '{') ++depth;
      else if (c == ']' || c == '}') {
        if (--depth == 0) {
          end = i;
          break;
        }
      }
    }
    if (end == std::string_view::npos) continue;
    auto candidate = Json::parse(text.substr(start, end - start + 1), nullptr, false);
    if (candidate.is_discarded()) continue;
    if (wantArray && !(candidate.is_array() || candidate.is_object())) continue;
    if (!wantArray && !candidate.is_object()) continue;
    return candidate;
  }
  return std::nullopt;
}

std::string lower_alnum(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

int as_coordinate(const Json& v, const std::string& path) {
  if (v.is_number_integer()) return static_cast<int>(v.get<std::int64_t>());
  if (v.is_number_float()) return round_half_up(v.get<double>());
  throw Error(ErrorCode::UnparseableDelta, path + " must be a number", path);
}

std::string body_after_response(std::string_view text) {
  auto body = after_last(text, "[Response]");
  std::string_view chosen = body ? *body : text;
  chosen = trim(chosen);
  if (starts_with(chosen, ":")) chosen = chosen.substr(1);
  return strip_code_fences(chosen);
}

}  // namespace

std::string strip_code_fences(std::string_view text) {
  std::string_view s = trim(text);
  if (starts_with(s, "```")) {
    const auto nl = s.find('\n');
    s = nl == std::string_view::npos ? std::string_view{} : s.substr(nl + 1);
    s = trim(s);
    if (ends_with(s, "```")) s = trim(s.substr(0, s.size() - 3));
  }
  if (s.size() >= 4 && lower_alnum(s.substr(0, 4)) == "json") {
    const std::string_view rest = s.substr(4);
    if (rest.empty() || std::isspace(static_cast<unsigned char>(rest.front())) || rest.front() == '[' ||
        rest.front() == '{') {
      s = trim(rest);
    }
  }
  return std::string(s);
}

std::string parse_caption_response(std::string_view text) {
  auto rest = after_last(text, "[Instruction]:");
  if (!rest) throw Error(ErrorCode::MissingInstructionMarker, "response has no [Instruction]: marker");
  std::string_view remaining = *rest;
  while (!remaining.empty()) {
    const auto nl = remaining.find('\n');
    std::string_view line = remaining.substr(0, nl);
    remaining = nl == std::string_view::npos ? std::string_view{} : remaining.substr(nl + 1);
    std::string caption = strip_quotes(line);
    if (!caption.empty()) return caption;
  }
  throw Error(ErrorCode::MissingInstructionMarker, "[Instruction]: marker is not followed by an instruction",
              "empty");
}

InstructionClass parse_class_response(std::string_view text) {
  auto rest = after_last(text, "[Class]");
  const std::string normalized = lower_alnum(rest ? *rest : text);
  const bool fixture = normalized.find("fixturestatechange") != std::string::npos;
  const bool object = normalized.find("objectmanipulation") != std::string::npos;
  if (fixture == object) {
    throw Error(ErrorCode::UnparseableClass,
                fixture ? "response names both instruction classes" : "response names no instruction class");
  }
  return fixture ? InstructionClass::FixtureStateChange : InstructionClass::ObjectManipulation;
}

std::vector<StateDelta> parse_state_edit_response(const Environment& env, std::string_view text) {
  const std::string body = body_after_response(text);
  auto doc = extract_json(body, true);
  if (!doc) throw Error(ErrorCode::UnparseableDelta, "response holds no list of state edits");
  Json list = doc->is_array() ? *doc : Json::array({*doc});
  if (list.empty()) throw Error(ErrorCode::UnparseableDelta, "response lists no state edits");

  std::vector<StateDelta> deltas;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "[" + std::to_string(i) + "]";
    const Json& entry = list[i];
    if (!entry.is_object()) throw Error(ErrorCode::UnparseableDelta, path + " is not a dictionary", path);
    StateDelta delta;
    for (const auto& item : entry.items()) {
      if (item.key() == "fixtures") {
        if (!item.value().is_object()) throw Error(ErrorCode::UnparseableDelta, path + ".fixtures is not a dictionary", path);
        for (const auto& f : item.value().items()) {
          const auto* fixture = env.find_fixture(f.key());
          if (fixture == nullptr) throw Error(ErrorCode::UnknownName, "unknown fixture '" + f.key() + "'", f.key());
          const Json& v = f.value().is_object() && f.value().contains("state") ? f.value()["state"] : f.value();
          if (!v.is_string()) throw Error(ErrorCode::UnparseableDelta, path + ".fixtures." + f.key() + " is not a state", path);
          const auto state = v.get<std::string>();
          if (std::find(fixture->possibleStates.begin(), fixture->possibleStates.end(), state) ==
              fixture->possibleStates.end()) {
            throw Error(ErrorCode::IllegalState, "'" + state + "' is not a state of '" + f.key() + "'", f.key());
          }
          delta.fixtures[f.key()] = state;
        }
      } else if (item.key() == "objects") {
        if (!item.value().is_object()) throw Error(ErrorCode::UnparseableDelta, path + ".objects is not a dictionary", path);
        for (const auto& o : item.value().items()) {
          if (env.find_object(o.key()) == nullptr) {
            throw Error(ErrorCode::UnknownName, "unknown object '" + o.key() + "'", o.key());
          }
          const std::string op = path + ".objects." + o.key();
          if (!o.value().is_object() || !o.value().contains("x") || !o.value().contains("y")) {
            throw Error(ErrorCode::UnparseableDelta, op + " needs x and y", op);
          }
          const Point p{as_coordinate(o.value()["x"], op + ".x"), as_coordinate(o.value()["y"], op + ".y")};
          if (!in_canvas(p, env.canvas)) throw Error(ErrorCode::OutOfBounds, op + " lies outside the canvas", o.key());
          delta.poses[o.key()] = p;
        }
      } else {
        throw Error(ErrorCode::UnparseableDelta, path + " has unexpected key '" + item.key() + "'", path);
      }
    }
    if (delta.fixtures.empty() && delta.poses.empty()) {
      throw Error(ErrorCode::UnparseableDelta, path + " changes nothing", path);
    }
    deltas.push_back(std::move(delta));
  }
  return deltas;
}

std::vector<EnvState> materialize_deltas(const Environment& env, const EnvState& start,
                                         const std::vector<StateDelta>& deltas) {
  std::vector<EnvState> states;
  EnvState current = start;
  for (const auto& delta : deltas) {
    EnvState next = current;
    for (const auto& [name, pose] : delta.poses) next = apply_object_move(env, next, name, pose);
    for (const auto& [name, state] : delta.fixtures) {
      env.fixture(name);
      next.fixtureStates[name] = state;
    }
    require_valid_state(env, next);
    if (next.objectPoses == current.objectPoses && next.fixtureStates == current.fixtureStates) continue;
    states.push_back(next);
    current = std::move(next);
  }
  if (states.empty()) throw Error(ErrorCode::UnparseableDelta, "state edits leave the scene unchanged");
  return states;
}

PredictionParse parse_prediction_response(std::string_view text) {
  const std::string body = body_after_response(text);
  auto doc = extract_json(body, true);
  if (!doc || !doc->is_array()) throw Error(ErrorCode::UnparseableList, "response holds no list of dictionaries");
  if (doc->empty()) throw Error(ErrorCode::UnparseableList, "response lists no steps");

  PredictionParse out;
  for (std::size_t i = 0; i < doc->size(); ++i) {
    const Json& entry = (*doc)[i];
    const std::string path = "[" + std::to_string(i) + "]";
    if (!entry.is_object()) throw Error(ErrorCode::UnparseableList, path + " is not a dictionary", path);
    auto action = entry.find("action");
    auto change = entry.find("change_needed");
    if (action == entry.end() || !action->is_string() || change == entry.end() || !change->is_string()) {
      throw Error(ErrorCode::UnparseableList, path + " needs string 'action' and 'change_needed'", path);
    }
    const std::string needed(trim(change->get<std::string>()));
    if (needed != kChangeBackground && needed != kMoveObjects) {
      throw Error(ErrorCode::BadChangeNeeded, "change_needed '" + needed + "' is neither '" +
                                                  std::string(kChangeBackground) + "' nor '" +
                                                  std::string(kMoveObjects) + "'",
                  needed);
    }
    out.actions.push_back({action->get<std::string>(), needed});
  }
  if (out.actions.size() > 2) {
    out.warnings.push_back("model proposed " + std::to_string(out.actions.size()) + " steps; kept the first 2");
    out.actions.resize(2);
  }
  return out;
}

std::string serialize_prediction_body(const std::vector<PredictedAction>& actions) {
  Json list = Json::array();
  for (const auto& a : actions) list.push_back(Json{{"action", a.action}, {"change_needed", a.changeNeeded}});
  return list.dump();
}

std::string parse_program_summary(std::string_view text) {
  auto rest = after_last(text, "[Response]");
  if (!rest) throw Error(ErrorCode::MissingResponseMarker, "response has no [Response] marker");
  std::string_view s = trim(*rest);
  if (starts_with(s, ":")) s = trim(s.substr(1));
  if (s.empty()) throw Error(ErrorCode::MissingResponseMarker, "[Response] marker is not followed by text", "empty");
  return std::string(s);
}

}  // namespace frameplan::llm
