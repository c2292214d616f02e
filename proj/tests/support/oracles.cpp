#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace frameplan::oracle {

ChangeSet diff(const EnvState& a, const EnvState& b) {
  ChangeSet cs;
  std::set<std::string> names;
  for (const auto& [n, p] : a.objectPoses) names.insert(n);
  for (const auto& [n, p] : b.objectPoses) names.insert(n);
  for (const auto& n : names) {
    const Point from = a.objectPoses.at(n);
    const Point to = b.objectPoses.at(n);
    if (from.x != to.x || from.y != to.y) cs.movedObjects.push_back({n, from, to});
  }
  std::set<std::string> fixtures;
  for (const auto& [n, s] : a.fixtureStates) fixtures.insert(n);
  for (const auto& [n, s] : b.fixtureStates) fixtures.insert(n);
  for (const auto& n : fixtures) {
    if (a.fixtureStates.at(n) != b.fixtureStates.at(n)) {
      cs.fixtureChanges.push_back({n, a.fixtureStates.at(n), b.fixtureStates.at(n)});
    }
  }
  if (a.objectOrder != b.objectOrder) cs.order = OrderChange{a.objectOrder, b.objectOrder};
  return cs;
}

EnvState apply(const ChangeSet& cs, const EnvState& s) {
  EnvState out = s;
  for (const auto& m : cs.movedObjects) out.objectPoses[m.name] = m.to;
  for (const auto& f : cs.fixtureChanges) out.fixtureStates[f.name] = f.to;
  if (cs.order) out.objectOrder = cs.order->after;
  return out;
}

ChangeSet normalize(const ChangeSet& cs) {
  ChangeSet out;
  for (const auto& m : cs.movedObjects) {
    if (!(m.from == m.to)) out.movedObjects.push_back(m);
  }
  for (const auto& f : cs.fixtureChanges) {
    if (f.from != f.to) out.fixtureChanges.push_back(f);
  }
  // insertion sort keeps this obviously correct rather than fast
  for (std::size_t i = 1; i < out.movedObjects.size(); ++i) {
    for (std::size_t j = i; j > 0 && out.movedObjects[j].name < out.movedObjects[j - 1].name; --j) {
      std::swap(out.movedObjects[j], out.movedObjects[j - 1]);
    }
  }
  for (std::size_t i = 1; i < out.fixtureChanges.size(); ++i) {
    for (std::size_t j = i; j > 0 && out.fixtureChanges[j].name < out.fixtureChanges[j - 1].name; --j) {
      std::swap(out.fixtureChanges[j], out.fixtureChanges[j - 1]);
    }
  }
  if (cs.order && cs.order->before != cs.order->after) out.order = cs.order;
  return out;
}

ChangeSet random_changeset(const Environment& env, const EnvState& s, std::mt19937& rng) {
  ChangeSet cs;
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution rare(0.15);
  std::uniform_int_distribution<int> xs(0, env.canvas.width - 1);
  std::uniform_int_distribution<int> ys(0, env.canvas.height - 1);
  for (const auto& [name, pose] : s.objectPoses) {
    if (!coin(rng)) continue;
    cs.movedObjects.push_back({name, pose, rare(rng) ? pose : Point{xs(rng), ys(rng)}});
  }
  for (const auto& [name, state] : s.fixtureStates) {
    if (!coin(rng)) continue;
    const auto& states = env.fixture(name).possibleStates;
    std::uniform_int_distribution<std::size_t> pick(0, states.size() - 1);
    cs.fixtureChanges.push_back({name, state, states[pick(rng)]});
  }
  if (coin(rng)) {
    auto after = s.objectOrder;
    std::shuffle(after.begin(), after.end(), rng);
    cs.order = OrderChange{s.objectOrder, after};
  }
  std::shuffle(cs.movedObjects.begin(), cs.movedObjects.end(), rng);
  std::shuffle(cs.fixtureChanges.begin(), cs.fixtureChanges.end(), rng);
  return cs;
}

char symbol(Event e) {
  switch (e) {
    case Event::DragA: return 'a';
    case Event::DragB: return 'b';
    case Event::Toggle: return 't';
    case Event::Copy: return 'c';
    case Event::SelectPrev: return 's';
    case Event::Delete: return 'd';
  }
  return '?';
}

namespace {

std::vector<char> changed_objects(const ModelStep& prev, const ModelStep& cur) {
  std::vector<char> out;
  for (char o : {'a', 'b'}) {
    const int p = prev.drops.count(o) ? prev.drops.at(o) : 0;
    const int c = cur.drops.count(o) ? cur.drops.at(o) : 0;
    if (p != c) out.push_back(o);
  }
  return out;
}

}  // namespace

void step_model(Model& m, Event e, int fixtureStates) {
  m.rejected = false;
  auto insert_after = [&](ModelStep step) {
    m.steps.insert(m.steps.begin() + static_cast<std::ptrdiff_t>(m.selected + 1), std::move(step));
    ++m.selected;
  };
  switch (e) {
    case Event::DragA:
    case Event::DragB: {
      const char obj = e == Event::DragA ? 'a' : 'b';
      ModelStep& cur = m.steps[m.selected];
      const bool coalesce = m.selected > 0 && cur.kind == 'D' && cur.fixture == m.steps[m.selected - 1].fixture &&
                            changed_objects(m.steps[m.selected - 1], cur) == std::vector<char>{obj};
      ModelStep next = cur;
      next.drops[obj] = m.nextToken++;  // every drop lands on a fresh pose
      if (coalesce) {
        cur.drops = next.drops;
      } else {
        next.kind = 'D';
        insert_after(next);
      }
      return;
    }
    case Event::Toggle: {
      ModelStep next = m.steps[m.selected];
      next.fixture = (next.fixture + 1) % fixtureStates;
      next.kind = 'T';
      insert_after(next);
      return;
    }
    case Event::Copy: {
      ModelStep next = m.steps[m.selected];
      next.kind = 'C';
      insert_after(next);
      return;
    }
    case Event::SelectPrev:
      if (m.selected > 0) --m.selected;
      return;
    case Event::Delete:
      if (m.selected == 0) {
        m.rejected = true;
        return;
      }
      m.steps.erase(m.steps.begin() + static_cast<std::ptrdiff_t>(m.selected));
      --m.selected;
      return;
  }
}

std::map<std::size_t, std::size_t> exhaustive_lcs(const std::vector<judge::ChangeSignature>& participant,
                                                  const std::vector<judge::ChangeSignature>& oracle) {
  // Enumerate every increasing pair list by recursion over (participant, oracle) positions.
  std::vector<std::pair<std::size_t, std::size_t>> best;
  std::vector<std::pair<std::size_t, std::size_t>> current;
  auto better = [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    std::vector<std::size_t> ap, bp, ao, bo;
    for (const auto& [p, o] : a) ap.push_back(p), ao.push_back(o);
    for (const auto& [p, o] : b) bp.push_back(p), bo.push_back(o);
    if (ap != bp) return ap < bp;
    return ao < bo;
  };
  bool any = false;
  std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t p0, std::size_t o0) {
    if (!any || better(current, best)) {
      best = current;
      any = true;
    }
    for (std::size_t p = p0; p < participant.size(); ++p) {
      for (std::size_t o = o0; o < oracle.size(); ++o) {
        if (!(participant[p] == oracle[o])) continue;
        current.emplace_back(p, o);
        walk(p + 1, o + 1);
        current.pop_back();
      }
    }
  };
  walk(0, 0);
  std::map<std::size_t, std::size_t> out;
  for (const auto& [p, o] : best) out[o] = p;
  return out;
}

judge::ChangeSignature random_signature(std::mt19937& rng, int alphabet) {
  std::uniform_int_distribution<int> pick(0, alphabet - 1);
  judge::ChangeSignature sig;
  const int v = pick(rng);
  if (v % 2 == 0) {
    sig.moves.push_back({"o" + std::to_string(v), "cell:0,0", "cell:" + std::to_string(v) + ",1"});
  } else {
    sig.fixtures.push_back({"f" + std::to_string(v), "closed", "open"});
  }
  return sig;
}

std::size_t combination_count(const std::vector<int>& statesPerFixture) {
  std::size_t n = 1;
  for (int s : statesPerFixture) n *= static_cast<std::size_t>(s);
  return n;
}

}  // namespace frameplan::oracle
