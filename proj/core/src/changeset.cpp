#include "frameplan/changeset.hpp"

#include <algorithm>
#include <map>

#include "frameplan/error.hpp"

namespace frameplan {
namespace {

std::string point_text(Point p) { return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")"; }

template <typename Entry>
void sort_and_check_unique(std::vector<Entry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.name < b.name; });
  auto dup = std::adjacent_find(entries.begin(), entries.end(),
                                [](const Entry& a, const Entry& b) { return a.name == b.name; });
  if (dup != entries.end()) {
    throw Error(ErrorCode::ChangeSetMismatch, "change set names '" + dup->name + "' twice", dup->name);
  }
}

}  // namespace

ChangeSet diff(const EnvState& a, const EnvState& b) {
  ChangeSet cs;
  if (a.objectPoses.size() != b.objectPoses.size() || a.fixtureStates.size() != b.fixtureStates.size()) {
    throw Error(ErrorCode::EnvironmentMismatch, "states describe different environments");
  }
  for (auto ia = a.objectPoses.begin(), ib = b.objectPoses.begin(); ia != a.objectPoses.end(); ++ia, ++ib) {
    if (ia->first != ib->first) {
      throw Error(ErrorCode::EnvironmentMismatch, "object sets differ at '" + ia->first + "'", ia->first);
    }
    if (ia->second != ib->second) cs.movedObjects.push_back({ia->first, ia->second, ib->second});
  }
  for (auto ia = a.fixtureStates.begin(), ib = b.fixtureStates.begin(); ia != a.fixtureStates.end(); ++ia, ++ib) {
    if (ia->first != ib->first) {
      throw Error(ErrorCode::EnvironmentMismatch, "fixture sets differ at '" + ia->first + "'", ia->first);
    }
    if (ia->second != ib->second) cs.fixtureChanges.push_back({ia->first, ia->second, ib->second});
  }
  if (a.objectOrder != b.objectOrder) {
    auto sa = a.objectOrder;
    auto sb = b.objectOrder;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) throw Error(ErrorCode::EnvironmentMismatch, "object orders hold different names");
    cs.order = OrderChange{a.objectOrder, b.objectOrder};
  }
  return cs;
}

ChangeSet normalize(ChangeSet cs) {
  std::erase_if(cs.movedObjects, [](const ObjectMove& m) { return m.from == m.to; });
  std::erase_if(cs.fixtureChanges, [](const FixtureChange& f) { return f.from == f.to; });
  sort_and_check_unique(cs.movedObjects);
  sort_and_check_unique(cs.fixtureChanges);
  if (cs.order && cs.order->before == cs.order->after) cs.order.reset();
  return cs;
}

EnvState apply(const ChangeSet& raw, const EnvState& s) {
  const ChangeSet cs = normalize(raw);
  EnvState out = s;
  for (const auto& m : cs.movedObjects) {
    auto it = out.objectPoses.find(m.name);
    if (it == out.objectPoses.end()) {
      throw Error(ErrorCode::ChangeSetMismatch, "no object '" + m.name + "' to move", m.name);
    }
    if (it->second != m.from) {
      throw Error(ErrorCode::ChangeSetMismatch,
                  "'" + m.name + "' is at " + point_text(it->second) + ", change expects " + point_text(m.from),
                  m.name);
    }
    it->second = m.to;
  }
  for (const auto& f : cs.fixtureChanges) {
    auto it = out.fixtureStates.find(f.name);
    if (it == out.fixtureStates.end()) {
      throw Error(ErrorCode::ChangeSetMismatch, "no fixture '" + f.name + "' to change", f.name);
    }
    if (it->second != f.from) {
      throw Error(ErrorCode::ChangeSetMismatch,
                  "'" + f.name + "' is " + it->second + ", change expects " + f.from, f.name);
    }
    it->second = f.to;
  }
  if (cs.order) {
    if (out.objectOrder != cs.order->before) {
      throw Error(ErrorCode::ChangeSetMismatch, "object order differs from the change's starting order");
    }
    auto before = cs.order->before;
    auto after = cs.order->after;
    std::sort(before.begin(), before.end());
    std::sort(after.begin(), after.end());
    if (before != after) throw Error(ErrorCode::ChangeSetMismatch, "order change is not a permutation");
    out.objectOrder = cs.order->after;
  }
  return out;
}

ChangeSet compose(const ChangeSet& firstRaw, const ChangeSet& secondRaw) {
  const ChangeSet first = normalize(firstRaw);
  const ChangeSet second = normalize(secondRaw);
  ChangeSet out;

  std::map<std::string, ObjectMove> moves;
  for (const auto& m : first.movedObjects) moves.emplace(m.name, m);
  for (const auto& m : second.movedObjects) {
    auto [it, inserted] = moves.emplace(m.name, m);
    if (inserted) continue;
    if (it->second.to != m.from) {
      throw Error(ErrorCode::ComposeMismatch,
                  "'" + m.name + "' ends at " + point_text(it->second.to) + " but the next change starts at " +
                      point_text(m.from),
                  m.name);
    }
    it->second.to = m.to;
  }
  for (auto& [name, m] : moves) out.movedObjects.push_back(m);

  std::map<std::string, FixtureChange> fixtures;
  for (const auto& f : first.fixtureChanges) fixtures.emplace(f.name, f);
  for (const auto& f : second.fixtureChanges) {
    auto [it, inserted] = fixtures.emplace(f.name, f);
    if (inserted) continue;
    if (it->second.to != f.from) {
      throw Error(ErrorCode::ComposeMismatch,
                  "'" + f.name + "' ends " + it->second.to + " but the next change starts " + f.from, f.name);
    }
    it->second.to = f.to;
  }
  for (auto& [name, f] : fixtures) out.fixtureChanges.push_back(f);

  if (first.order && second.order) {
    if (first.order->after != second.order->before) {
      throw Error(ErrorCode::ComposeMismatch, "object orders do not chain");
    }
    out.order = OrderChange{first.order->before, second.order->after};
  } else if (first.order) {
    out.order = first.order;
  } else if (second.order) {
    out.order = second.order;
  }
  return normalize(std::move(out));
}

}  // namespace frameplan
