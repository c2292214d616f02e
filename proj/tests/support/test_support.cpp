#include "test_support.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

namespace frameplan::testing {

std::filesystem::path bundle_root() { return FRAMEPLAN_TEST_BUNDLE_DIR; }
std::filesystem::path golden_dir() { return FRAMEPLAN_TEST_GOLDEN_DIR; }
std::filesystem::path asset_dir() { return FRAMEPLAN_TEST_ASSET_DIR; }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const Bundle& demo_bundle(const std::string& id) {
  static std::mutex mutex;
  static std::map<std::string, Bundle> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(id);
  if (it == cache.end()) it = cache.emplace(id, load_bundle(bundle_root() / id)).first;
  return it->second;
}

service::SessionArchive bundle_archive(const std::string& id, const std::string& file) {
  return service::read_archive(bundle_root() / id / file);
}

std::shared_ptr<const Environment> synthetic_env(const SyntheticSpec& spec) {
  auto env = std::make_shared<Environment>();
  env->canvas = {320, 240};
  for (int i = 0; i < spec.objects; ++i) {
    ObjectSpec o;
    o.name = "o" + std::to_string(i);
    const bool bowl = spec.receptacle && i == 0;
    o.cls = bowl ? "bowl" : "item";
    o.boundingBox = bowl ? Box{200, 150, 80, 60} : Box{10 + 40 * i, 20, 30, 30};
    o.category = bowl ? "dishware" : "food";
    o.isReceptacle = bowl;
    o.width = o.boundingBox.w;
    o.height = o.boundingBox.h;
    o.image = "iVBORw0KGgo=";
    env->objects.emplace(o.name, o);
  }
  for (int f = 0; f < spec.fixtures; ++f) {
    FixtureSpec fx;
    fx.name = "f" + std::to_string(f);
    fx.cls = "drawer";
    fx.boundingBox = {10 + 60 * f, 120, 50, 40};
    fx.category = "furniture";
    fx.width = 50;
    fx.height = 40;
    fx.x = fx.boundingBox.x;
    fx.y = fx.boundingBox.y;
    for (int s = 0; s < spec.statesPerFixture; ++s) fx.possibleStates.push_back("s" + std::to_string(s));
    env->fixtures.emplace(fx.name, fx);
  }
  for (const auto& combo : fixture_state_combinations(*env)) env->backgrounds[background_key(*env, combo)] = "AAAA";
  return env;
}

EnvState initial_state(const Environment& env) {
  EnvState s;
  s.caption = "Initial state";
  for (const auto& [name, o] : env.objects) {
    s.objectPoses[name] = {o.boundingBox.x, o.boundingBox.y};
    s.objectOrder.push_back(name);
  }
  for (const auto& [name, f] : env.fixtures) s.fixtureStates[name] = f.possibleStates.front();
  return s;
}

EnvState random_state(const Environment& env, std::mt19937& rng) {
  EnvState s;
  std::uniform_int_distribution<int> xs(0, env.canvas.width - 1);
  std::uniform_int_distribution<int> ys(0, env.canvas.height - 1);
  std::bernoulli_distribution keep(0.5);
  for (const auto& [name, o] : env.objects) {
    // Half the objects stay put so diffs mix moved and unmoved entries.
    s.objectPoses[name] = keep(rng) ? Point{o.boundingBox.x, o.boundingBox.y} : Point{xs(rng), ys(rng)};
    s.objectOrder.push_back(name);
  }
  for (const auto& [name, f] : env.fixtures) {
    std::uniform_int_distribution<std::size_t> pick(0, f.possibleStates.size() - 1);
    s.fixtureStates[name] = f.possibleStates[pick(rng)];
  }
  if (keep(rng)) std::shuffle(s.objectOrder.begin(), s.objectOrder.end(), rng);
  return s;
}

}  // namespace frameplan::testing
