#include <gtest/gtest.h>

#include "frameplan/bundle.hpp"
#include "frameplan/digest.hpp"
#include "frameplan/error.hpp"
#include "frameplan/serialization.hpp"
#include "test_support.hpp"

namespace frameplan {
namespace {

Json golden(const std::string& name) {
  return parse_document(testing::read_text(testing::golden_dir() / name), name);
}

TEST(Serialization, EnvironmentGoldenRoundTrip) {
  const Json doc = golden("environment.json");
  const Environment env = deserialize_environment(doc);
  EXPECT_TRUE(validate_environment(env).empty());
  EXPECT_TRUE(env.objects.at("bowl").isReceptacle);
  EXPECT_EQ(env.fixtures.at("drawer").possibleStates, (std::vector<std::string>{"closed", "open"}));
  EXPECT_EQ(serialize_environment(env), doc);
}

TEST(Serialization, StateGoldenRoundTrip) {
  const Environment env = deserialize_environment(golden("environment.json"));
  const Json doc = golden("state.json");
  const EnvState s = deserialize_state(env, doc);
  EXPECT_EQ(s.objectPoses.at("orange"), (Point{430, 305}));
  EXPECT_EQ(serialize_state(s), doc);
}

TEST(Serialization, FieldNamesAreExact) {
  const Environment env = deserialize_environment(golden("environment.json"));
  const Json object = serialize_object(env.objects.at("orange"));
  std::vector<std::string> keys;
  for (const auto& [k, v] : object.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"boundingBox", "category", "class", "height", "image", "isReceptacle",
                                            "width"}));
  keys.clear();
  const Json fixture = serialize_fixture(env.fixtures.at("drawer"));
  for (const auto& [k, v] : fixture.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"boundingBox", "category", "class", "height", "possibleStates", "width",
                                            "x", "y"}));
  keys.clear();
  EnvState s = deserialize_state(env, golden("state.json"));
  const Json state = serialize_state(s);
  for (const auto& [k, v] : state.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"caption", "fixtures", "objectOrder", "objects"}));
}

TEST(Serialization, BundledManifestsRoundTrip) {
  for (const auto& id : testing::kDemoBundles) {
    const Bundle& b = testing::demo_bundle(id);
    const Json envDoc = serialize_environment(*b.environment);
    EXPECT_EQ(deserialize_environment(envDoc), *b.environment) << id;
    EXPECT_EQ(serialize_environment(deserialize_environment(envDoc)), envDoc) << id;
    const Json stateDoc = serialize_state(b.initialState);
    EXPECT_EQ(deserialize_state(*b.environment, stateDoc), b.initialState) << id;
    // the manifest itself, once rasters are inlined, is a fixed point too
    const Json manifest = bundle_manifest(b);
    EXPECT_EQ(manifest.at("id"), id);
  }
}

TEST(Serialization, ParseErrorCarriesOffset) {
  try {
    parse_document("{\"a\": [1, 2,, 3]}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_EQ(e.detail(), "13");
  }
}

TEST(Serialization, SchemaErrorsNameTheField) {
  const Json env = golden("environment.json");
  auto expect_schema = [](const auto& f, const std::string& detail) {
    try {
      f();
      ADD_FAILURE() << "no error for " << detail;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::SchemaError);
      EXPECT_EQ(e.detail(), detail);
    }
  };
  Json doc = env;
  doc["objects"]["orange"]["isReceptacle"] = "yes";
  expect_schema([&] { deserialize_environment(doc); }, "objects.orange.isReceptacle");
  doc = env;
  doc["objects"]["orange"].erase("class");
  expect_schema([&] { deserialize_environment(doc); }, "objects.orange.class");
  doc = env;
  doc["fixtures"]["drawer"]["boundingBox"] = Json::array({1, 2, 3});
  expect_schema([&] { deserialize_environment(doc); }, "fixtures.drawer.boundingBox");

  const Environment e = deserialize_environment(env);
  Json state = golden("state.json");
  state["objects"].erase("bowl");
  try {
    deserialize_state(e, state);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::SchemaError);
  }
}

TEST(Digest, KnownVectors) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(base64_encode("hello"), "aGVsbG8=");
  EXPECT_EQ(base64_decode("aGVsbG8="), "hello");
  EXPECT_THROW(base64_decode("a*b="), Error);
}

}  // namespace
}  // namespace frameplan
