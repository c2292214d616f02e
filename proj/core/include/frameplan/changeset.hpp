#pragma once

#include <optional>
#include <string>
#include <vector>

#include "frameplan/environment.hpp"

namespace frameplan {

struct ObjectMove {
  std::string name;
  Point from;
  Point to;
  friend bool operator==(const ObjectMove&, const ObjectMove&) = default;
};

struct FixtureChange {
  std::string name;
  std::string from;
  std::string to;
  friend bool operator==(const FixtureChange&, const FixtureChange&) = default;
};

struct OrderChange {
  std::vector<std::string> before;
  std::vector<std::string> after;
  friend bool operator==(const OrderChange&, const OrderChange&) = default;
};

/// Difference between two snapshots of one environment. Normalized form keeps entries
/// sorted by name, one per name, none with from == to.
struct ChangeSet {
  std::vector<ObjectMove> movedObjects;
  std::vector<FixtureChange> fixtureChanges;
  std::optional<OrderChange> order;

  bool empty() const { return movedObjects.empty() && fixtureChanges.empty() && !order; }
  bool orderChanged() const { return order.has_value(); }
  friend bool operator==(const ChangeSet&, const ChangeSet&) = default;
};

ChangeSet diff(const EnvState& a, const EnvState& b);

/// Applies `cs` to `s`; each `from` value must match `s` (ChangeSetMismatch otherwise).
/// The caption is carried over from `s`.
EnvState apply(const ChangeSet& cs, const EnvState& s);

/// Sorts entries and drops no-ops. Duplicate names raise ChangeSetMismatch.
ChangeSet normalize(ChangeSet cs);

/// The single ChangeSet equivalent to `first` then `second`.
ChangeSet compose(const ChangeSet& first, const ChangeSet& second);

}  // namespace frameplan
