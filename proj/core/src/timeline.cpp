#include "frameplan/timeline.hpp"

#include <algorithm>
#include <set>

#include "frameplan/error.hpp"
#include "frameplan/llm/instructions.hpp"

namespace frameplan {

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::Initial: return "initial";
    case Provenance::Drag: return "drag";
    case Provenance::Toggle: return "toggle";
    case Provenance::Language: return "language";
    case Provenance::Predicted: return "predicted";
    case Provenance::Copy: return "copy";
  }
  return "initial";
}

Provenance provenance_from_string(std::string_view text) {
  for (auto p : {Provenance::Initial, Provenance::Drag, Provenance::Toggle, Provenance::Language,
                 Provenance::Predicted, Provenance::Copy}) {
    if (to_string(p) == text) return p;
  }
  throw Error(ErrorCode::SchemaError, "unknown provenance '" + std::string(text) + "'", "provenance");
}

Timeline Timeline::init(std::shared_ptr<const Environment> env, EnvState initialState) {
  require_valid_state(*env, initialState);
  Timeline tl;
  tl.env_ = std::move(env);
  tl.steps_.push_back(tl.make_step(std::move(initialState), std::string(kInitialCaption), Provenance::Initial));
  return tl;
}

Timeline Timeline::restore(std::shared_ptr<const Environment> env, std::vector<Step> steps,
                           std::size_t selected, std::uint64_t revision, std::int64_t nextId) {
  if (steps.empty()) throw Error(ErrorCode::InvalidState, "a timeline needs at least the initial step");
  if (steps.front().provenance != Provenance::Initial) {
    throw Error(ErrorCode::InvalidState, "step 0 must have provenance 'initial'", "steps[0]");
  }
  std::set<std::int64_t> ids;
  std::int64_t maxId = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& step = steps[i];
    if (i > 0 && step.provenance == Provenance::Initial) {
      throw Error(ErrorCode::InvalidState, "only step 0 may be 'initial'", "steps[" + std::to_string(i) + "]");
    }
    if (!ids.insert(step.id).second) {
      throw Error(ErrorCode::InvalidState, "duplicate step id " + std::to_string(step.id),
                  "steps[" + std::to_string(i) + "]");
    }
    maxId = std::max(maxId, step.id);
    require_valid_state(*env, step.state);
  }
  if (selected >= steps.size()) throw Error(ErrorCode::IndexOutOfRange, "selected step out of range");
  Timeline tl;
  tl.env_ = std::move(env);
  tl.steps_ = std::move(steps);
  tl.selected_ = selected;
  tl.revision_ = revision;
  tl.nextId_ = std::max(nextId, maxId + 1);
  return tl;
}

const Step& Timeline::step(std::size_t index) const {
  if (index >= steps_.size()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "step " + std::to_string(index) + " of " + std::to_string(steps_.size()),
                std::to_string(index));
  }
  return steps_[index];
}

ChangeSet Timeline::change_at(std::size_t index) const {
  if (index == 0) {
    step(0);
    return {};
  }
  return diff(step(index - 1).state, step(index).state);
}

Timeline Timeline::bumped() const {
  Timeline next = *this;
  ++next.revision_;
  return next;
}

Step Timeline::make_step(EnvState state, std::string caption, Provenance provenance) {
  state.caption = caption;
  return Step{nextId_++, std::move(state), std::move(caption), true, provenance};
}

Timeline Timeline::record_drag(const std::string& object, Point to) const {
  const Step& current = selected_step();
  EnvState moved = apply_object_move(*env_, current.state, object, to);
  if (moved.objectPoses == current.state.objectPoses) return *this;

  const bool coalesce = [&] {
    if (selected_ == 0 || current.provenance != Provenance::Drag) return false;
    const ChangeSet cs = change_at(selected_);
    return cs.fixtureChanges.empty() && cs.movedObjects.size() == 1 && cs.movedObjects.front().name == object;
  }();

  Timeline next = bumped();
  if (coalesce) {
    moved.caption.clear();
    if (diff(steps_[selected_ - 1].state, moved).empty()) {
      next.steps_.erase(next.steps_.begin() + static_cast<std::ptrdiff_t>(selected_));
      next.selected_ = selected_ - 1;
      return next;
    }
    Step& step = next.steps_[selected_];
    step.state = std::move(moved);
    step.caption.clear();
    return next;
  }
  auto at = next.steps_.begin() + static_cast<std::ptrdiff_t>(selected_ + 1);
  next.steps_.insert(at, next.make_step(std::move(moved), "", Provenance::Drag));
  next.selected_ = selected_ + 1;
  return next;
}

Timeline Timeline::record_drag(const std::string& object, double x, double y) const {
  return record_drag(object, Point{round_half_up(x), round_half_up(y)});
}

Timeline Timeline::record_toggle(const std::string& fixture) const {
  EnvState toggled = apply_fixture_toggle(*env_, selected_step().state, fixture);
  const std::string caption = llm::fixture_caption(fixture, toggled.fixtureStates.at(fixture));
  Timeline next = bumped();
  auto at = next.steps_.begin() + static_cast<std::ptrdiff_t>(selected_ + 1);
  next.steps_.insert(at, next.make_step(std::move(toggled), caption, Provenance::Toggle));
  next.selected_ = selected_ + 1;
  return next;
}

Timeline Timeline::copy_step(std::size_t index) const {
  const Step& source = step(index);
  Timeline next = bumped();
  Step copy = next.make_step(source.state, source.caption, Provenance::Copy);
  copy.linked = source.linked;
  next.steps_.insert(next.steps_.begin() + static_cast<std::ptrdiff_t>(index + 1), std::move(copy));
  next.selected_ = index + 1;
  return next;
}

Timeline Timeline::delete_step(std::size_t index) const {
  step(index);
  if (index == 0) throw Error(ErrorCode::CannotDeleteInitial, "the initial step cannot be deleted", "0");
  Timeline next = bumped();
  next.steps_.erase(next.steps_.begin() + static_cast<std::ptrdiff_t>(index));
  if (selected_ >= index) next.selected_ = selected_ - 1;
  next.selected_ = std::min(next.selected_, next.steps_.size() - 1);
  return next;
}

Timeline Timeline::select(std::size_t index) const {
  step(index);
  Timeline next = bumped();
  next.selected_ = index;
  return next;
}

Timeline Timeline::reorder(const std::string& object, std::optional<std::size_t> position) const {
  if (selected_ == 0) {
    throw Error(ErrorCode::CannotEditInitial, "the initial step cannot be edited", "0");
  }
  env_->object(object);
  const auto& order = selected_step().state.objectOrder;
  const std::size_t target = position.value_or(order.size() - 1);
  if (target >= order.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "draw position " + std::to_string(target) + " out of range",
                std::to_string(target));
  }
  std::vector<std::string> reordered = order;
  reordered.erase(std::find(reordered.begin(), reordered.end(), object));
  reordered.insert(reordered.begin() + static_cast<std::ptrdiff_t>(target), object);
  if (reordered == order) return *this;
  Timeline next = bumped();
  next.steps_[selected_].state.objectOrder = std::move(reordered);
  return next;
}

Timeline Timeline::insert_states(const std::vector<EnvState>& states, Provenance provenance,
                                 const std::vector<std::string>& captions) const {
  if (provenance == Provenance::Initial) {
    throw Error(ErrorCode::InvalidState, "only step 0 may be 'initial'");
  }
  for (const auto& s : states) require_valid_state(*env_, s);
  if (states.empty()) return *this;
  Timeline next = bumped();
  std::size_t at = selected_ + 1;
  for (std::size_t i = 0; i < states.size(); ++i) {
    std::string caption = i < captions.size() ? captions[i] : std::string{};
    next.steps_.insert(next.steps_.begin() + static_cast<std::ptrdiff_t>(at),
                       next.make_step(states[i], std::move(caption), provenance));
    ++at;
  }
  next.selected_ = at - 1;
  return next;
}

Timeline Timeline::set_caption(std::size_t index, std::string caption, bool linked) const {
  step(index);
  if (index == 0) throw Error(ErrorCode::CannotEditInitial, "the initial step cannot be edited", "0");
  Timeline next = bumped();
  next.steps_[index].state.caption = caption;
  next.steps_[index].caption = std::move(caption);
  next.steps_[index].linked = linked;
  return next;
}

Timeline Timeline::replace_state(std::size_t index, EnvState state) const {
  step(index);
  if (index == 0) throw Error(ErrorCode::CannotEditInitial, "the initial step cannot be edited", "0");
  require_valid_state(*env_, state);
  Timeline next = bumped();
  state.caption = next.steps_[index].caption;
  next.steps_[index].state = std::move(state);
  return next;
}

Timeline Timeline::annotate(std::size_t index, std::string caption) const {
  step(index);
  if (index == 0) throw Error(ErrorCode::CannotEditInitial, "the initial step cannot be edited", "0");
  Timeline next = *this;
  next.steps_[index].state.caption = caption;
  next.steps_[index].caption = std::move(caption);
  return next;
}

std::vector<TimelineWarning> Timeline::warnings() const {
  std::vector<TimelineWarning> out;
  for (std::size_t i = 1; i < steps_.size(); ++i) {
    const auto& s = steps_[i];
    const ChangeSet cs = change_at(i);
    const std::size_t entries = cs.movedObjects.size() + cs.fixtureChanges.size();
    if (entries == 0 && s.provenance != Provenance::Copy) {
      out.push_back({i, "step " + std::to_string(i) + " no longer changes anything against its predecessor"});
    } else if (entries > 1 && (s.provenance == Provenance::Drag || s.provenance == Provenance::Toggle)) {
      out.push_back({i, "step " + std::to_string(i) + " now carries " + std::to_string(entries) +
                            " changes against its predecessor"});
    }
  }
  return out;
}

bool Timeline::equivalent(const Timeline& other) const {
  if (selected_ != other.selected_ || steps_.size() != other.steps_.size()) return false;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const auto& a = steps_[i];
    const auto& b = other.steps_[i];
    if (a.state != b.state || a.caption != b.caption || a.linked != b.linked || a.provenance != b.provenance) {
      return false;
    }
  }
  return *env_ == *other.env_;
}

}  // namespace frameplan
