#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "frameplan/environment.hpp"

namespace frameplan {

using Json = nlohmann::json;

/// Parses UTF-8 text into a document. Failures raise ParseError whose detail is the byte offset.
Json parse_document(std::string_view text, std::string_view source = "document");

Json serialize_object(const ObjectSpec& object);
Json serialize_fixture(const FixtureSpec& fixture);
Json serialize_environment(const Environment& env);
Json serialize_state(const EnvState& state);

// Deserializers raise SchemaError with the dotted field path as detail.
ObjectSpec deserialize_object(const std::string& name, const Json& doc, const std::string& path = "objects");
FixtureSpec deserialize_fixture(const std::string& name, const Json& doc, const std::string& path = "fixtures");
Environment deserialize_environment(const Json& doc);
EnvState deserialize_state(const Json& doc);

/// Deserializes and checks the state against `env` (key sets, legal fixture states, order).
EnvState deserialize_state(const Environment& env, const Json& doc);

/// Environment document with raster payloads replaced by `image://<name>` references.
/// Used when environments are attached to prompts.
Json environment_prompt_document(const Environment& env);

}  // namespace frameplan
