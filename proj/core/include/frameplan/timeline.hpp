#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frameplan/changeset.hpp"
#include "frameplan/environment.hpp"

namespace frameplan {

enum class Provenance { Initial, Drag, Toggle, Language, Predicted, Copy };

std::string_view to_string(Provenance p) noexcept;
Provenance provenance_from_string(std::string_view text);  // throws SchemaError

inline constexpr std::string_view kInitialCaption = "Initial state";

struct Step {
  std::int64_t id = 0;
  EnvState state;
  std::string caption;
  bool linked = true;
  Provenance provenance = Provenance::Initial;

  friend bool operator==(const Step&, const Step&) = default;
};

struct TimelineWarning {
  std::size_t index = 0;
  std::string message;
};

/// Ordered instruction steps anchored at the initial snapshot.
///
/// Timeline is a value: every editing operation returns a new timeline and leaves the
/// receiver untouched. Step 0 is the initial state and is never edited. `revision`
/// increases by one for every operation that changes the timeline.
class Timeline {
 public:
  static Timeline init(std::shared_ptr<const Environment> env, EnvState initialState);

  // Restores a timeline from stored parts; validates every step against `env`.
  static Timeline restore(std::shared_ptr<const Environment> env, std::vector<Step> steps,
                          std::size_t selected, std::uint64_t revision, std::int64_t nextId);

  const Environment& environment() const { return *env_; }
  const std::shared_ptr<const Environment>& environment_ptr() const { return env_; }
  const std::vector<Step>& steps() const { return steps_; }
  const Step& step(std::size_t index) const;
  std::size_t size() const { return steps_.size(); }
  std::size_t selected() const { return selected_; }
  const Step& selected_step() const { return steps_[selected_]; }
  std::uint64_t revision() const { return revision_; }
  std::int64_t next_id() const { return nextId_; }

  /// ChangeSet of step `index` against its predecessor (empty for step 0).
  ChangeSet change_at(std::size_t index) const;

  Timeline record_drag(const std::string& object, Point to) const;
  Timeline record_drag(const std::string& object, double x, double y) const;
  Timeline record_toggle(const std::string& fixture) const;
  Timeline copy_step(std::size_t index) const;
  Timeline delete_step(std::size_t index) const;
  Timeline select(std::size_t index) const;

  /// Moves `object` within the selected step's draw order (to the front when `position` is
  /// empty). Edits the selected step in place; never creates a step.
  Timeline reorder(const std::string& object, std::optional<std::size_t> position) const;

  /// Inserts already-materialized states after the selected step and selects the last one.
  Timeline insert_states(const std::vector<EnvState>& states, Provenance provenance,
                         const std::vector<std::string>& captions) const;

  Timeline set_caption(std::size_t index, std::string caption, bool linked) const;
  Timeline replace_state(std::size_t index, EnvState state) const;

  /// Attaches a caption computed for the mutation that produced this timeline; part of
  /// the same revision.
  Timeline annotate(std::size_t index, std::string caption) const;

  /// Steps downstream of edits that no longer express a change against their predecessor.
  std::vector<TimelineWarning> warnings() const;

  /// Equality of steps (ignoring ids) and selection; revision is bookkeeping.
  bool equivalent(const Timeline& other) const;

  friend bool operator==(const Timeline& a, const Timeline& b) {
    return *a.env_ == *b.env_ && a.steps_ == b.steps_ && a.selected_ == b.selected_ &&
           a.revision_ == b.revision_ && a.nextId_ == b.nextId_;
  }

 private:
  Timeline() = default;
  Timeline bumped() const;
  Step make_step(EnvState state, std::string caption, Provenance provenance);

  std::shared_ptr<const Environment> env_;
  std::vector<Step> steps_;
  std::size_t selected_ = 0;
  std::uint64_t revision_ = 0;
  std::int64_t nextId_ = 0;
};

}  // namespace frameplan
