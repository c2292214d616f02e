#include "frameplan/codegen.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include "frameplan/changeset.hpp"
#include "frameplan/error.hpp"
#include "frameplan/llm/parsers.hpp"
#include "frameplan/serialization.hpp"

namespace frameplan::codegen {
namespace {

bool is_faucet(const FixtureSpec& f) {
  std::string cls = f.cls;
  std::transform(cls.begin(), cls.end(), cls.begin(), [](unsigned char c) { return std::tolower(c); });
  return cls.find("faucet") != std::string::npos;
}

std::string fixture_description(const Environment& env, const FixtureSpec& f) {
  const auto sameClass = std::count_if(env.fixtures.begin(), env.fixtures.end(),
                                       [&](const auto& kv) { return kv.second.cls == f.cls; });
  return sameClass > 1 ? f.name : f.cls;
}

/// The covering object with the largest overlap; ties go to the lower name.
const ObjectSpec* best_cover(const Environment& env, const EnvState& state, const std::string& moved, const Box& box,
                             bool receptacle) {
  const ObjectSpec* best = nullptr;
  double bestCoverage = kContainmentThreshold;
  for (const auto& [name, spec] : env.objects) {
    if (name == moved || spec.isReceptacle != receptacle) continue;
    const double c = coverage(box, object_box(env, state, name));
    if (c > bestCoverage) {
      best = &spec;
      bestCoverage = c;
    }
  }
  return best;
}

std::string container_description(const Environment& env, const EnvState& state, const std::string& moved,
                                  const ObjectSpec& container) {
  std::string out = describe_target(env, state, container.name);
  const Box containerBox = object_box(env, state, container.name);
  std::vector<std::string> contents;
  for (const auto& [name, spec] : env.objects) {
    if (name == moved || name == container.name) continue;
    if (coverage(object_box(env, state, name), containerBox) > kContainmentThreshold) {
      contents.push_back(describe_target(env, state, name));
    }
  }
  std::sort(contents.begin(), contents.end());
  for (std::size_t i = 0; i < contents.size(); ++i) out += (i == 0 ? " with " : " and ") + contents[i];
  return out;
}

std::string place_target(const Environment& env, const EnvState& state, const std::string& moved, const Box& box) {
  if (const auto* r = best_cover(env, state, moved, box, true)) return container_description(env, state, moved, *r);
  const FixtureSpec* region = nullptr;
  double best = kContainmentThreshold;
  for (const auto& [name, f] : env.fixtures) {
    const double c = coverage(box, f.boundingBox);
    if (c > best) {
      region = &f;
      best = c;
    }
  }
  if (region != nullptr) return fixture_description(env, *region);
  return "counter at (" + std::to_string(box.x) + "," + std::to_string(box.y) + ")";
}

void append(PolicyProgram& program, SkillCall call, std::int64_t source) {
  program.calls.push_back(std::move(call));
  program.sources.push_back(source);
}

void require_sequence(const Environment& env, const std::vector<EnvState>& states) {
  if (states.size() < 2) throw Error(ErrorCode::InvalidSequence, "translation needs at least two states");
  for (const auto& s : states) require_valid_state(env, s);
}

PolicyProgram translate(const Environment& env, const std::vector<EnvState>& states,
                        const std::function<std::int64_t(std::size_t)>& sourceOf) {
  require_sequence(env, states);
  PolicyProgram program;
  for (std::size_t i = 1; i < states.size(); ++i) {
    const EnvState& prev = states[i - 1];
    const EnvState& cur = states[i];
    const ChangeSet cs = diff(prev, cur);
    const auto source = sourceOf(i);
    for (const auto& move : cs.movedObjects) {
      const std::string subject = describe_target(env, prev, move.name);
      append(program, SkillCall::pick(subject), source);
      const Box box = object_box(env, cur, move.name);
      if (const auto* other = best_cover(env, cur, move.name, box, false)) {
        append(program, SkillCall::stack_object(subject, describe_target(env, cur, other->name)), source);
      } else {
        append(program, SkillCall::place(place_target(env, cur, move.name, box)), source);
      }
    }
    for (const auto& change : cs.fixtureChanges) {
      const auto& fixture = env.fixture(change.name);
      if (is_faucet(fixture) && change.to == "on") {
        append(program, SkillCall::turn_on_faucet(), source);
      } else if (is_faucet(fixture) && change.to == "off") {
        append(program, SkillCall::turn_off_faucet(), source);
      } else {
        throw Error(ErrorCode::UnsupportedFixture,
                    "no skill primitive sets '" + change.name + "' to '" + change.to + "'", change.name);
      }
    }
  }
  return program;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + '"';
}

class CallParser {
 public:
  CallParser(std::string_view line, std::size_t lineNo) : s_(line), line_(std::to_string(lineNo)) {}

  SkillCall parse() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string name(s_.substr(start, pos_ - start));
    if (name.empty()) fail("expected a primitive name");
    skip_space();
    if (!consume('(')) fail("expected '(' after " + name);
    std::vector<std::string> args;
    skip_space();
    if (!consume(')')) {
      for (;;) {
        skip_space();
        args.push_back(string_literal());
        skip_space();
        if (consume(')')) break;
        if (!consume(',')) fail("expected ',' or ')'");
      }
    }
    skip_space();
    consume(';');
    skip_space();
    if (pos_ != s_.size()) fail("unexpected text after call");

    const auto primitive = primitive_from_string(name);
    if (!primitive) throw Error(ErrorCode::UnknownPrimitive, "line " + line_ + ": unknown primitive '" + name + "'", name);
    if (args.size() != arity(*primitive)) {
      throw Error(ErrorCode::ArityError,
                  "line " + line_ + ": " + name + " takes " + std::to_string(arity(*primitive)) + " argument(s), got " +
                      std::to_string(args.size()),
                  name);
    }
    return {*primitive, std::move(args)};
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::UnparseableCall, "line " + line_ + ": " + why, line_);
  }
  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool consume(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  std::string string_literal() {
    if (!consume('"')) fail("arguments must be double-quoted strings");
    std::string out;
    while (pos_ < s_.size()) {
      const char c = s_[pos_++];
      if (c == '"') {
        if (out.empty()) fail("empty target");
        return out;
      }
      if (c != '\\') {
        out += c;
        continue;
      }
      if (pos_ >= s_.size()) break;
      switch (const char e = s_[pos_++]) {
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 't': out += '\t'; break;
        case '"':
        case '\\': out += e; break;
        default: fail(std::string("unknown escape \\") + e);
      }
    }
    fail("unterminated string");
  }

  std::string_view s_;
  std::string line_;
  std::size_t pos_ = 0;
};

/// Descriptions an object answers to anywhere in the sequence.
std::set<std::string> object_aliases(const Environment& env, const std::vector<EnvState>& states,
                                     const std::string& object) {
  std::set<std::string> out{object, env.object(object).cls};
  for (const auto& s : states) out.insert(describe_target(env, s, object));
  return out;
}

bool known_target(const Environment& env, const std::vector<EnvState>& states, const std::string& target) {
  if (target.rfind("counter at (", 0) == 0) return true;
  for (const auto& [name, f] : env.fixtures) {
    if (target == name || target == f.cls) return true;
  }
  for (const auto& [name, spec] : env.objects) {
    for (const auto& alias : object_aliases(env, states, name)) {
      if (target == alias || target.rfind(alias + " with ", 0) == 0) return true;
    }
  }
  return false;
}

/// Kuhn's augmenting-path matching of picks to expected moves.
bool augment(std::size_t pick, const std::vector<std::vector<std::size_t>>& edges, std::vector<bool>& seen,
             std::vector<std::ptrdiff_t>& owner) {
  for (auto move : edges[pick]) {
    if (seen[move]) continue;
    seen[move] = true;
    if (owner[move] < 0 || augment(static_cast<std::size_t>(owner[move]), edges, seen, owner)) {
      owner[move] = static_cast<std::ptrdiff_t>(pick);
      return true;
    }
  }
  return false;
}

}  // namespace

std::string_view to_string(Primitive p) noexcept {
  switch (p) {
    case Primitive::Pick: return "pick";
    case Primitive::Place: return "place";
    case Primitive::Grasp: return "grasp";
    case Primitive::Ungrasp: return "ungrasp";
    case Primitive::TurnOnFaucet: return "turn_on_faucet";
    case Primitive::TurnOffFaucet: return "turn_off_faucet";
    case Primitive::StackObject: return "stack_object";
  }
  return "pick";
}

std::size_t arity(Primitive p) noexcept {
  switch (p) {
    case Primitive::Pick:
    case Primitive::Place:
    case Primitive::Grasp: return 1;
    case Primitive::StackObject: return 2;
    default: return 0;
  }
}

std::optional<Primitive> primitive_from_string(std::string_view name) {
  for (auto p : kAllPrimitives) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

std::string_view to_string(ProgramIssue::Kind kind) noexcept {
  switch (kind) {
    case ProgramIssue::Kind::UnknownTarget: return "unknown-target";
    case ProgramIssue::Kind::DanglingPick: return "dangling-pick";
    case ProgramIssue::Kind::PlaceWithoutPick: return "place-without-pick";
    case ProgramIssue::Kind::Extraneous: return "extraneous";
  }
  return "unknown-target";
}

std::string describe_target(const Environment& env, const EnvState& state, const std::string& object) {
  const auto& spec = env.object(object);
  std::vector<std::pair<int, std::string>> peers;  // (centre x, name)
  for (const auto& [name, other] : env.objects) {
    if (other.cls == spec.cls) peers.emplace_back(object_box(env, state, name).center().x, name);
  }
  if (peers.size() == 1) return spec.cls;
  std::sort(peers.begin(), peers.end());
  const auto rank = static_cast<std::size_t>(
      std::find_if(peers.begin(), peers.end(), [&](const auto& p) { return p.second == object; }) - peers.begin());
  if (rank == 0) return "left " + spec.cls;
  if (rank + 1 == peers.size()) return "right " + spec.cls;
  if (peers.size() == 3) return "middle " + spec.cls;
  return "number " + std::to_string(rank + 1) + " from the left " + spec.cls;
}

PolicyProgram translate_rule_based(const Environment& env, const std::vector<EnvState>& states) {
  return translate(env, states, [](std::size_t i) { return static_cast<std::int64_t>(i); });
}

PolicyProgram translate_rule_based(const Timeline& tl) {
  std::vector<EnvState> states;
  for (const auto& step : tl.steps()) states.push_back(step.state);
  return translate(tl.environment(), states, [&](std::size_t i) { return tl.steps()[i].id; });
}

llm::PromptBundle build_codegen_prompt(const Environment& env, const std::vector<EnvState>& states) {
  if (states.size() < 2) throw Error(ErrorCode::InvalidSequence, "translation needs at least two states");
  std::vector<llm::Attachment> attachments{
      {std::string(llm::kEnvironmentLabel), environment_prompt_document(env).dump()}};
  for (std::size_t i = 0; i < states.size(); ++i) {
    attachments.push_back({llm::step_label(i + 1), serialize_state(states[i]).dump()});
  }
  return llm::make_bundle(llm::PromptKind::CodeGen, std::move(attachments));
}

PolicyProgram parse_program(std::string_view text) {
  PolicyProgram program;
  std::size_t lineNo = 0;
  while (!text.empty()) {
    ++lineNo;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line.substr(first, 3) == "```") continue;
    program.calls.push_back(CallParser(line, lineNo).parse());
  }
  return program;
}

std::string emit(const PolicyProgram& program) {
  std::string out;
  for (const auto& call : program.calls) {
    out += to_string(call.primitive);
    out += '(';
    for (std::size_t i = 0; i < call.args.size(); ++i) {
      if (i > 0) out += ", ";
      out += quote(call.args[i]);
    }
    out += ")\n";
  }
  return out;
}

PolicyProgram translate_with_model(llm::Provider& provider, const Environment& env,
                                   const std::vector<EnvState>& states) {
  require_sequence(env, states);
  const auto reply = provider.complete(build_codegen_prompt(env, states));
  return parse_program(llm::strip_code_fences(reply.text));
}

ProgramReport validate_program(const Environment& env, const std::vector<EnvState>& states,
                               const PolicyProgram& program) {
  ProgramReport report;
  const auto& calls = program.calls;

  for (std::size_t i = 0; i < calls.size(); ++i) {
    for (const auto& arg : calls[i].args) {
      if (!known_target(env, states, arg)) {
        report.push_back({ProgramIssue::Kind::UnknownTarget, i, "'" + arg + "' names nothing in the scene"});
      }
    }
  }

  // Carry discipline: a pick must be closed by a place or stack before the next pick.
  constexpr std::size_t kEmptyHand = static_cast<std::size_t>(-1);
  std::size_t holding = kEmptyHand;
  std::vector<std::size_t> acquisitions;  // calls that take an object off the scene
  for (std::size_t i = 0; i < calls.size(); ++i) {
    switch (calls[i].primitive) {
      case Primitive::Pick:
      case Primitive::Grasp:
        if (holding != kEmptyHand) report.push_back({ProgramIssue::Kind::DanglingPick, holding, "pick is never placed"});
        holding = i;
        acquisitions.push_back(i);
        break;
      case Primitive::Place:
      case Primitive::Ungrasp:
        if (holding == kEmptyHand) report.push_back({ProgramIssue::Kind::PlaceWithoutPick, i, "nothing is held here"});
        holding = kEmptyHand;
        break;
      case Primitive::StackObject:
        if (holding == kEmptyHand) acquisitions.push_back(i);  // stacks without a prior pick carry their own source
        holding = kEmptyHand;
        break;
      default: break;
    }
  }
  if (holding != kEmptyHand) report.push_back({ProgramIssue::Kind::DanglingPick, holding, "pick is never placed"});

  // Every acquisition must account for a distinct moved object in some consecutive change.
  std::vector<std::set<std::string>> expected;
  int faucetOn = 0;
  int faucetOff = 0;
  if (states.size() >= 2) {
    for (std::size_t i = 1; i < states.size(); ++i) {
      const auto cs = diff(states[i - 1], states[i]);
      for (const auto& m : cs.movedObjects) expected.push_back(object_aliases(env, states, m.name));
      for (const auto& f : cs.fixtureChanges) {
        if (!is_faucet(env.fixture(f.name))) continue;
        if (f.to == "on") ++faucetOn;
        if (f.to == "off") ++faucetOff;
      }
    }
  }
  std::vector<std::vector<std::size_t>> edges(acquisitions.size());
  for (std::size_t a = 0; a < acquisitions.size(); ++a) {
    const auto& source = calls[acquisitions[a]].args.front();
    for (std::size_t m = 0; m < expected.size(); ++m) {
      if (expected[m].count(source) > 0) edges[a].push_back(m);
    }
  }
  std::vector<std::ptrdiff_t> owner(expected.size(), -1);
  std::vector<bool> matched(acquisitions.size(), false);
  for (std::size_t a = 0; a < acquisitions.size(); ++a) {
    std::vector<bool> seen(expected.size(), false);
    augment(a, edges, seen, owner);
  }
  for (auto o : owner) {
    if (o >= 0) matched[static_cast<std::size_t>(o)] = true;
  }
  for (std::size_t a = 0; a < acquisitions.size(); ++a) {
    if (!matched[a]) {
      report.push_back({ProgramIssue::Kind::Extraneous, acquisitions[a],
                        "'" + calls[acquisitions[a]].args.front() + "' is not moved by any step"});
    }
  }
  for (std::size_t i = 0; i < calls.size(); ++i) {
    if (calls[i].primitive == Primitive::TurnOnFaucet && faucetOn-- <= 0) {
      report.push_back({ProgramIssue::Kind::Extraneous, i, "no step turns a faucet on"});
    } else if (calls[i].primitive == Primitive::TurnOffFaucet && faucetOff-- <= 0) {
      report.push_back({ProgramIssue::Kind::Extraneous, i, "no step turns a faucet off"});
    }
  }

  std::stable_sort(report.begin(), report.end(),
                   [](const ProgramIssue& a, const ProgramIssue& b) { return a.callIndex < b.callIndex; });
  return report;
}

}  // namespace frameplan::codegen
