#include "frameplan/service/session_service.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include "frameplan/codegen.hpp"
#include "frameplan/error.hpp"
#include "frameplan/judge.hpp"
#include "frameplan/llm/instructions.hpp"
#include "frameplan/scene.hpp"

namespace frameplan::service {
namespace {

constexpr int kMaxCommitAttempts = 5;

/// Computes the next snapshot outside the writer (provider calls included), then commits
/// it against the revision it was computed from. Without a client revision a lost race
/// is recomputed on the fresh snapshot; with one it is the client's conflict to resolve.
template <typename Compute>
std::shared_ptr<const SessionSnapshot> mutate(Session& session, std::optional<std::uint64_t> revision,
                                              Compute&& compute) {
  for (int attempt = 1;; ++attempt) {
    auto snap = session.snapshot();
    if (revision && *revision != snap->timeline.revision()) {
      throw Error(ErrorCode::RevisionConflict,
                  "revision " + std::to_string(*revision) + " is stale; session is at " +
                      std::to_string(snap->timeline.revision()),
                  std::to_string(snap->timeline.revision()));
    }
    SessionSnapshot next = compute(*snap);
    try {
      return session.commit(snap->timeline.revision(), [&](const SessionSnapshot&) { return std::move(next); });
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RevisionConflict || revision || attempt >= kMaxCommitAttempts) throw;
    }
  }
}

const Json& require(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw Error(ErrorCode::BadRequest, std::string("missing field '") + key + "'", key);
  }
  return doc[key];
}

template <typename T>
T require_as(const Json& doc, const char* key) {
  const Json& v = require(doc, key);
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw Error(ErrorCode::BadRequest, std::string("'") + key + "' must be a string", key);
  } else if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) throw Error(ErrorCode::BadRequest, std::string("'") + key + "' must be a number", key);
  } else {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw Error(ErrorCode::BadRequest, std::string("'") + key + "' must be a non-negative integer", key);
    }
  }
  return v.get<T>();
}

Json point_json(Point p) { return {{"x", p.x}, {"y", p.y}}; }

Json proposals_json(const SessionSnapshot& snap) {
  Json out = Json::array();
  for (std::size_t k = 0; k < snap.proposals.size(); ++k) {
    const auto& p = snap.proposals[k];
    const ChangeSet cs = diff(snap.timeline.selected_step().state, p.state);
    Json moved = Json::array();
    for (const auto& m : cs.movedObjects) moved.push_back({{"name", m.name}, {"from", point_json(m.from)}, {"to", point_json(m.to)}});
    Json fixtures = Json::array();
    for (const auto& f : cs.fixtureChanges) fixtures.push_back({{"name", f.name}, {"from", f.from}, {"to", f.to}});
    out.push_back({{"index", k},
                   {"action", p.action},
                   {"changeNeeded", p.changeNeeded},
                   {"baseRevision", p.baseRevision},
                   {"stale", p.baseRevision != snap.timeline.revision()},
                   {"diff", {{"moved", moved}, {"fixtures", fixtures}}},
                   {"state", serialize_state(p.state)}});
  }
  return out;
}

Json mutation_result(const SessionSnapshot& snap, const std::vector<std::string>& warnings) {
  const Timeline& tl = snap.timeline;
  return {{"revision", tl.revision()},
          {"selected", tl.selected()},
          {"step", step_summary(tl, tl.selected())},
          {"timeline", timeline_summary(tl)},
          {"warnings", warnings}};
}

Timeline apply_event(const Timeline& tl, const Json& event) {
  const auto type = require_as<std::string>(event, "type");
  if (type == "drag") {
    return tl.record_drag(require_as<std::string>(event, "object"), require_as<double>(event, "x"),
                          require_as<double>(event, "y"));
  }
  if (type == "toggle") return tl.record_toggle(require_as<std::string>(event, "fixture"));
  if (type == "click") {
    const Point p{static_cast<int>(require_as<double>(event, "x")), static_cast<int>(require_as<double>(event, "y"))};
    const auto hit = hit_test(tl.environment(), tl.selected_step().state, p);
    if (!hit || hit->kind != HitTarget::Kind::Fixture) {
      throw Error(ErrorCode::ValidationFailed, "click does not land on a fixture", std::to_string(p.x) + "," + std::to_string(p.y));
    }
    return tl.record_toggle(hit->name);
  }
  if (type == "copy") return tl.copy_step(require_as<std::size_t>(event, "index"));
  if (type == "delete") return tl.delete_step(require_as<std::size_t>(event, "index"));
  if (type == "select") return tl.select(require_as<std::size_t>(event, "index"));
  if (type == "reorder") {
    std::optional<std::size_t> position;
    if (event.contains("position") && !event["position"].is_null()) position = require_as<std::size_t>(event, "position");
    return tl.reorder(require_as<std::string>(event, "object"), position);
  }
  throw Error(ErrorCode::BadRequest, "unknown event type '" + type + "'", type);
}

std::string random_token() {
  static std::mutex mutex;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mutex);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
  return std::string("s") + std::string(buf, 12);
}

}  // namespace

Session::Session(std::string id, std::string bundleId, Timeline timeline)
    : id_(std::move(id)),
      bundleId_(std::move(bundleId)),
      committed_(std::make_shared<const SessionSnapshot>(SessionSnapshot{std::move(timeline), {}, 0})) {}

std::shared_ptr<const SessionSnapshot> Session::snapshot() const {
  std::lock_guard lock(publish_);
  return committed_;
}

void Session::check_revision(const SessionSnapshot& current, std::optional<std::uint64_t> expected) const {
  if (expected && *expected != current.timeline.revision()) {
    throw Error(ErrorCode::RevisionConflict,
                "revision " + std::to_string(*expected) + " is stale; session is at " +
                    std::to_string(current.timeline.revision()),
                std::to_string(current.timeline.revision()));
  }
}

void Session::publish(std::shared_ptr<const SessionSnapshot> next) {
  std::lock_guard lock(publish_);
  committed_ = std::move(next);
}

Json step_summary(const Timeline& tl, std::size_t index) {
  const Step& s = tl.step(index);
  const ChangeSet cs = tl.change_at(index);
  Json moved = Json::array();
  for (const auto& m : cs.movedObjects) moved.push_back({{"name", m.name}, {"from", point_json(m.from)}, {"to", point_json(m.to)}});
  Json fixtures = Json::array();
  for (const auto& f : cs.fixtureChanges) fixtures.push_back({{"name", f.name}, {"from", f.from}, {"to", f.to}});
  return {{"index", index},
          {"id", s.id},
          {"caption", s.caption},
          {"linked", s.linked},
          {"provenance", to_string(s.provenance)},
          {"diff", {{"moved", moved}, {"fixtures", fixtures}, {"orderChanged", cs.orderChanged()}}},
          {"state", serialize_state(s.state)}};
}

Json timeline_summary(const Timeline& tl) {
  Json steps = Json::array();
  for (std::size_t i = 0; i < tl.size(); ++i) steps.push_back(step_summary(tl, i));
  return {{"revision", tl.revision()}, {"selected", tl.selected()}, {"steps", std::move(steps)}};
}

SessionService::SessionService(BundleCatalog catalog, std::shared_ptr<llm::Provider> provider, ServiceOptions options)
    : catalog_(std::move(catalog)), provider_(std::move(provider)), options_(std::move(options)) {
  if (!provider_) throw Error(ErrorCode::BadRequest, "a provider is required");
}

std::shared_ptr<Session> SessionService::session(const std::string& id) const {
  std::lock_guard lock(sessionsMutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "no session '" + id + "'", id);
  return it->second;
}

std::string SessionService::next_session_id() {
  for (;;) {
    std::string id = random_token();
    std::lock_guard lock(sessionsMutex_);
    if (sessions_.count(id) == 0) return id;
  }
}

std::shared_ptr<Session> SessionService::add_session(std::string bundleId, Timeline timeline,
                                                     std::optional<std::string> id) {
  std::string sid = id ? *id : next_session_id();
  auto session = std::make_shared<Session>(sid, std::move(bundleId), std::move(timeline));
  std::lock_guard lock(sessionsMutex_);
  sessions_[sid] = session;
  return session;
}

Json SessionService::create_session(const std::string& bundleId) {
  const Bundle* bundle = catalog_.find(bundleId);
  if (bundle == nullptr) throw Error(ErrorCode::NotFound, "no bundle '" + bundleId + "'", bundleId);
  auto session = add_session(bundleId, Timeline::init(bundle->environment, bundle->initialState));
  return describe(session->id());
}

Json SessionService::create_session_from_archive(const Json& doc) {
  SessionArchive archive = deserialize_archive(doc);
  auto session = add_session(archive.bundleId, std::move(archive.timeline));
  return describe(session->id());
}

Json SessionService::describe(const std::string& id) const {
  auto s = session(id);
  auto snap = s->snapshot();
  const Environment& env = snap->timeline.environment();
  Json objects = Json::array();
  for (const auto& [name, o] : env.objects) {
    objects.push_back({{"name", name}, {"class", o.cls}, {"isReceptacle", o.isReceptacle},
                       {"hasGoals", env.goalLocations.count(name) > 0}});
  }
  Json fixtures = Json::array();
  for (const auto& [name, f] : env.fixtures) {
    fixtures.push_back({{"name", name}, {"class", f.cls}, {"possibleStates", f.possibleStates}});
  }
  return {{"sessionId", s->id()},
          {"bundle", s->bundle_id()},
          {"environment", {{"canvas", {{"width", env.canvas.width}, {"height", env.canvas.height}}},
                           {"objects", objects},
                           {"fixtures", fixtures}}},
          {"timeline", timeline_summary(snap->timeline)},
          {"proposals", proposals_json(*snap)}};
}

std::vector<std::string> SessionService::caption_new_steps(const Timeline& before, Timeline& after) const {
  std::vector<std::string> warnings;
  if (!options_.autoCaption || after.revision() == before.revision()) return warnings;
  const std::size_t i = after.selected();
  const Step& step = after.selected_step();
  if (i == 0 || step.provenance != Provenance::Drag || !step.caption.empty()) return warnings;
  try {
    after = after.annotate(i, llm::caption_change(*provider_, after.environment(), after.step(i - 1).state, step.state));
  } catch (const std::exception& e) {
    warnings.push_back(std::string("caption unavailable: ") + e.what());
  }
  return warnings;
}

Json SessionService::post_event(const std::string& id, std::optional<std::uint64_t> revision, const Json& event) {
  std::vector<std::string> warnings;
  auto snap = mutate(*session(id), revision, [&](const SessionSnapshot& cur) {
    Timeline next = apply_event(cur.timeline, event);
    warnings = caption_new_steps(cur.timeline, next);
    return SessionSnapshot{std::move(next), cur.proposals, cur.proposalRevision};
  });
  return mutation_result(*snap, warnings);
}

Json SessionService::edit_caption(const std::string& id, std::size_t index, std::string text, bool linked,
                                  std::optional<std::uint64_t> revision) {
  auto snap = mutate(*session(id), revision, [&](const SessionSnapshot& cur) {
    Timeline next = cur.timeline.set_caption(index, text, linked);
    if (linked) {
      // A linked caption is an instruction: the step's state follows from its predecessor.
      const auto states = llm::states_from_instruction(*provider_, next.environment(), next.step(index - 1).state, text);
      next = next.replace_state(index, states.back());
    }
    return SessionSnapshot{std::move(next), cur.proposals, cur.proposalRevision};
  });
  Json out = mutation_result(*snap, {});
  out["step"] = step_summary(snap->timeline, index);
  return out;
}

Json SessionService::instruct(const std::string& id, const std::string& text, std::optional<std::uint64_t> revision) {
  if (text.empty()) throw Error(ErrorCode::BadRequest, "instruction text is empty", "text");
  std::size_t created = 0;
  auto snap = mutate(*session(id), revision, [&](const SessionSnapshot& cur) {
    const auto states =
        llm::states_from_instruction(*provider_, cur.timeline.environment(), cur.timeline.selected_step().state, text);
    created = states.size();
    return SessionSnapshot{cur.timeline.insert_states(states, Provenance::Language, std::vector<std::string>(states.size(), text)),
                           cur.proposals, cur.proposalRevision};
  });
  Json out = mutation_result(*snap, {});
  Json steps = Json::array();
  const std::size_t last = snap->timeline.selected();
  for (std::size_t i = last + 1 - created; i <= last; ++i) steps.push_back(step_summary(snap->timeline, i));
  out["created"] = std::move(steps);
  return out;
}

Json SessionService::predict(const std::string& id) {
  auto s = session(id);
  const auto base = s->snapshot();
  auto proposals = propose_next_steps(base->timeline, *provider_);
  auto snap = s->commit(std::nullopt, [&](const SessionSnapshot& cur) {
    return SessionSnapshot{cur.timeline, proposals.steps, base->timeline.revision()};
  });
  return {{"revision", snap->timeline.revision()}, {"proposals", proposals_json(*snap)}, {"warnings", proposals.warnings}};
}

Json SessionService::accept_proposal(const std::string& id, std::size_t k) {
  auto snap = session(id)->commit(std::nullopt, [&](const SessionSnapshot& cur) {
    if (k >= cur.proposals.size()) {
      throw Error(ErrorCode::NotFound, "no proposal " + std::to_string(k), std::to_string(k));
    }
    return SessionSnapshot{accept_plausible(cur.timeline, cur.proposals[k]), {}, 0};
  });
  return mutation_result(*snap, {});
}

Json SessionService::reject_proposal(const std::string& id, std::size_t k) {
  auto snap = session(id)->commit(std::nullopt, [&](const SessionSnapshot& cur) {
    if (k >= cur.proposals.size()) {
      throw Error(ErrorCode::NotFound, "no proposal " + std::to_string(k), std::to_string(k));
    }
    SessionSnapshot next = cur;
    reject_plausible(next.proposals[k]);
    next.proposals.erase(next.proposals.begin() + static_cast<std::ptrdiff_t>(k));
    return next;
  });
  return {{"revision", snap->timeline.revision()}, {"proposals", proposals_json(*snap)}};
}

Json SessionService::goals(const std::string& id, const std::string& object) const {
  const auto proposal = propose_goals(session(id)->snapshot()->timeline, object);
  Json candidates = Json::array();
  for (const auto& g : proposal.candidates) candidates.push_back({{"label", g.label}, {"x", g.x}, {"y", g.y}});
  return {{"object", proposal.objectName}, {"candidates", candidates}};
}

Json SessionService::accept_goal(const std::string& id, const std::string& object, std::size_t candidate,
                                 std::optional<std::uint64_t> revision) {
  std::vector<std::string> warnings;
  auto snap = mutate(*session(id), revision, [&](const SessionSnapshot& cur) {
    Timeline next = frameplan::accept_goal(cur.timeline, propose_goals(cur.timeline, object), candidate);
    warnings = caption_new_steps(cur.timeline, next);
    return SessionSnapshot{std::move(next), cur.proposals, cur.proposalRevision};
  });
  return mutation_result(*snap, warnings);
}

std::string SessionService::scene(const std::string& id, std::size_t index, const std::string& mode,
                                  std::optional<int> width) const {
  const auto snap = session(id)->snapshot();
  const Timeline& tl = snap->timeline;
  const Step& step = tl.step(index);
  if (width && *width <= 0) throw Error(ErrorCode::BadRequest, "width must be positive", "width");
  SceneDoc doc;
  if (mode == "plain") {
    doc = compose_scene(tl.environment(), step.state);
  } else if (mode == "diff") {
    doc = compose_diff_scene(tl.environment(), step.state, tl.change_at(index));
  } else {
    throw Error(ErrorCode::BadRequest, "mode must be plain or diff", mode);
  }
  return render_vector(doc, {width});
}

Json SessionService::translate(const std::string& id, const std::string& path) const {
  const auto snap = session(id)->snapshot();
  const Timeline& tl = snap->timeline;
  std::vector<EnvState> states;
  for (const auto& s : tl.steps()) states.push_back(s.state);
  codegen::PolicyProgram program;
  if (path == "rule") {
    program = codegen::translate_rule_based(tl);
  } else if (path == "llm") {
    program = codegen::translate_with_model(*provider_, tl.environment(), states);
  } else {
    throw Error(ErrorCode::BadRequest, "path must be rule or llm", path);
  }
  const std::string text = codegen::emit(program);
  Json report = Json::array();
  for (const auto& issue : codegen::validate_program(tl.environment(), states, program)) {
    report.push_back({{"kind", codegen::to_string(issue.kind)}, {"call", issue.callIndex}, {"message", issue.message}});
  }
  const auto file = options_.dataDir / (id + "." + path + ".program.txt");
  std::filesystem::create_directories(options_.dataDir);
  std::ofstream(file, std::ios::binary | std::ios::trunc) << text;
  return {{"path", path}, {"revision", tl.revision()}, {"program", text}, {"report", report}, {"file", file.string()}};
}

Json SessionService::rebase_report(const std::string& id) const {
  const auto snap = session(id)->snapshot();
  const Timeline& tl = snap->timeline;
  Json warnings = Json::array();
  for (const auto& w : tl.warnings()) warnings.push_back({{"index", w.index}, {"message", w.message}});
  return {{"revision", tl.revision()}, {"warnings", warnings}};
}

Json SessionService::judge(const Json& participantArchive, const Json& oracleArchive) const {
  const auto participant = deserialize_archive(participantArchive);
  const auto oracle = deserialize_archive(oracleArchive);
  if (participant.timeline.environment() != oracle.timeline.environment()) {
    throw Error(ErrorCode::EnvironmentMismatch, "session and oracle use different environments");
  }
  const auto report =
      judge::judge_sequences(participant.timeline.environment(), archive_states(participant), archive_states(oracle));
  return judge::to_json(report);
}

std::filesystem::path SessionService::archive_path(const std::string& id) const {
  if (id.empty() || id.find_first_of("/\\.") != std::string::npos) {
    throw Error(ErrorCode::BadRequest, "session id '" + id + "' cannot name a file", id);
  }
  return options_.dataDir / (id + ".session.json");
}

SessionArchive SessionService::archive(const std::string& id) const {
  auto s = session(id);
  return SessionArchive{s->id(), s->bundle_id(), false, s->snapshot()->timeline};
}

Json SessionService::save_archive(const std::string& id) const {
  const auto a = archive(id);
  const auto path = archive_path(id);
  write_archive(path, a);
  return {{"sessionId", id}, {"revision", a.timeline.revision()}, {"file", path.string()}};
}

Json SessionService::load_archive(const std::string& id) {
  const auto path = archive_path(id);
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::NotFound, "no saved archive for '" + id + "'", id);
  SessionArchive a = read_archive(path);
  {
    std::lock_guard lock(sessionsMutex_);
    if (sessions_.count(id) == 0) sessions_[id] = std::make_shared<Session>(id, a.bundleId, a.timeline);
  }
  return serialize_archive(a);
}

}  // namespace frameplan::service
