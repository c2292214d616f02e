#include "frameplan/scene.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "frameplan/error.hpp"

namespace frameplan {
namespace {

std::string opacity_text(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", std::clamp(v, 0.0, 1.0));
  return buf;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string href(const std::string& image) {
  if (image.rfind("data:", 0) == 0) return xml_escape(image);
  return "data:image/png;base64," + xml_escape(image);
}

std::string image_attrs(const Box& box, double opacity, const std::string& image) {
  return " x=\"" + std::to_string(box.x) + "\" y=\"" + std::to_string(box.y) + "\" width=\"" +
         std::to_string(box.w) + "\" height=\"" + std::to_string(box.h) + "\" opacity=\"" +
         opacity_text(opacity) + "\" preserveAspectRatio=\"none\" xlink:href=\"" + href(image) + "\"";
}

std::string animate(const char* attribute, int from, int to) {
  return "<animate attributeName=\"" + std::string(attribute) + "\" from=\"" + std::to_string(from) +
         "\" to=\"" + std::to_string(to) + "\" dur=\"1s\" begin=\"indefinite\" fill=\"freeze\"/>";
}

}  // namespace

SceneDoc compose_scene(const Environment& env, const EnvState& state) {
  SceneDoc doc;
  doc.canvas = env.canvas;
  doc.background = {resolve_background(env, state), 1.0};
  for (const auto& name : state.objectOrder) {
    const auto& object = env.object(name);
    doc.objects.push_back({name, object.image, object_box(env, state, name), 1.0});
  }
  return doc;
}

SceneDoc compose_diff_scene(const Environment& env, const EnvState& state, const ChangeSet& cs) {
  SceneDoc doc = compose_scene(env, state);
  if (!cs.movedObjects.empty()) {
    std::set<std::string> moved;
    for (const auto& m : cs.movedObjects) {
      moved.insert(m.name);
      doc.animationHints.push_back({m.name, m.from, m.to});
    }
    for (auto& layer : doc.objects) layer.opacity = moved.count(layer.name) ? 1.0 : kDimOpacity;
    // A mixed change keeps the background legible; a pure move dims it.
    doc.background.opacity = cs.fixtureChanges.empty() ? kDimOpacity : 1.0;
  } else if (!cs.fixtureChanges.empty()) {
    for (auto& layer : doc.objects) layer.opacity = kDimOpacity;
    doc.background.opacity = 1.0;
  }
  if (!cs.fixtureChanges.empty()) {
    EnvState before = state;
    for (const auto& f : cs.fixtureChanges) before.fixtureStates[f.name] = f.from;
    doc.backgroundHint = BackgroundHint{resolve_background(env, before), doc.background.image};
  }
  return doc;
}

std::string render_vector(const SceneDoc& scene, const RenderOptions& options) {
  const int w = scene.canvas.width;
  const int h = scene.canvas.height;
  int outW = w;
  int outH = h;
  if (options.width && w > 0) {
    outW = *options.width;
    outH = round_half_up(static_cast<double>(h) * outW / w);
  }

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" "
         "version=\"1.1\" width=\"" + std::to_string(outW) + "\" height=\"" + std::to_string(outH) +
         "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) + "\">\n";

  out += "  <g id=\"background\">\n";
  const Box full{0, 0, w, h};
  out += "    <image id=\"background-current\" class=\"layer background" +
         std::string(scene.background.opacity < 1.0 ? " dimmed" : "") + "\"" +
         image_attrs(full, scene.background.opacity, scene.background.image) + "/>\n";
  if (scene.backgroundHint) {
    out += "    <image id=\"background-previous\" class=\"layer background hint\"" +
           image_attrs(full, 0.0, scene.backgroundHint->fromImage) + ">" +
           "<animate attributeName=\"opacity\" from=\"1\" to=\"0\" dur=\"1s\" begin=\"indefinite\" "
           "fill=\"freeze\"/></image>\n";
  }
  out += "  </g>\n";

  out += "  <g id=\"objects\">\n";
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& layer = scene.objects[i];
    const auto hint = std::find_if(scene.animationHints.begin(), scene.animationHints.end(),
                                   [&](const AnimationHint& a) { return a.name == layer.name; });
    out += "    <image id=\"object-" + std::to_string(i) + "\" class=\"layer object" +
           std::string(layer.opacity < 1.0 ? " dimmed" : "") +
           std::string(hint != scene.animationHints.end() ? " moved" : "") + "\"" +
           image_attrs(layer.box, layer.opacity, layer.image) + ">";
    out += "<title>" + xml_escape(layer.name) + "</title>";
    if (hint != scene.animationHints.end()) {
      out += animate("x", hint->from.x, hint->to.x);
      out += animate("y", hint->from.y, hint->to.y);
    }
    out += "</image>\n";
  }
  out += "  </g>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace frameplan
