#pragma once

#include <optional>
#include <string>
#include <vector>

#include "frameplan/changeset.hpp"
#include "frameplan/environment.hpp"

namespace frameplan {

/// Opacity applied to layers that did not change in a diff scene.
inline constexpr double kDimOpacity = 0.3;

struct BackgroundLayer {
  std::string image;
  double opacity = 1.0;
  friend bool operator==(const BackgroundLayer&, const BackgroundLayer&) = default;
};

struct ObjectLayer {
  std::string name;
  std::string image;
  Box box;
  double opacity = 1.0;
  friend bool operator==(const ObjectLayer&, const ObjectLayer&) = default;
};

/// Per-object motion for hover animation; the client interpolates from -> to.
struct AnimationHint {
  std::string name;
  Point from;
  Point to;
  friend bool operator==(const AnimationHint&, const AnimationHint&) = default;
};

/// Background before and after a fixture transition.
struct BackgroundHint {
  std::string fromImage;
  std::string toImage;
  friend bool operator==(const BackgroundHint&, const BackgroundHint&) = default;
};

struct SceneDoc {
  Size canvas;
  BackgroundLayer background;
  std::vector<ObjectLayer> objects;  // in draw order, back to front
  std::vector<AnimationHint> animationHints;
  std::optional<BackgroundHint> backgroundHint;

  friend bool operator==(const SceneDoc&, const SceneDoc&) = default;
};

SceneDoc compose_scene(const Environment& env, const EnvState& state);

/// Saliency styling for a step whose change against its predecessor is `cs`.
SceneDoc compose_diff_scene(const Environment& env, const EnvState& state, const ChangeSet& cs);

struct RenderOptions {
  /// Thumbnail width; height follows the canvas aspect ratio.
  std::optional<int> width;
};

/// SVG 1.1 text. Byte-identical for equal inputs.
std::string render_vector(const SceneDoc& scene, const RenderOptions& options = {});

}  // namespace frameplan
