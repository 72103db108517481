#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "flame/error.hpp"
#include "flame/model.hpp"
#include "flame/partition.hpp"

namespace flame::sugarscape {

/// Global model parameters. Distances are in landscape units.
struct ModelParams {
  double viewing_distance = 200.0;
  double eating_distance = 5.0;
  double run_distance = 5.5;
  double landscape_width = 200.0;
  double landscape_height = 200.0;
  std::int64_t citizens_per_scene = 50;
  std::int64_t sugars_per_scene = 1000;
  std::int64_t n_scenes = 20;
  std::int64_t iterations = 500;

  Bounds bounds() const { return {0.0, 0.0, landscape_width, landscape_height}; }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) fail(ErrorCode::InvalidArgument, std::string(name) + " must be > 0");
    };
    positive(viewing_distance, "viewing_distance");
    positive(eating_distance, "eating_distance");
    positive(run_distance, "run_distance");
    positive(landscape_width, "landscape_width");
    positive(landscape_height, "landscape_height");
    if (eating_distance > viewing_distance)
      fail(ErrorCode::InvalidArgument, "eating_distance must not exceed viewing_distance");
    if (citizens_per_scene < 1 || sugars_per_scene < 1 || n_scenes < 1 || iterations < 1)
      fail(ErrorCode::InvalidArgument, "counts must be >= 1");
  }

  /// Writes the distance and landscape constants into a model's environment.
  void apply_to(ModelDef& model) const {
    model.set_constant("viewing_distance", viewing_distance);
    model.set_constant("eating_distance", eating_distance);
    model.set_constant("run_distance", run_distance);
    model.set_constant("landscape_width", landscape_width);
    model.set_constant("landscape_height", landscape_height);
  }

  /// Reads whichever distance and landscape constants the model declares.
  static ModelParams from_model(const ModelDef& model) {
    ModelParams p;
    auto get = [&](std::string_view name, double& out) {
      if (auto c = model.find_constant(name)) out = as_real(c->value);
    };
    get("viewing_distance", p.viewing_distance);
    get("eating_distance", p.eating_distance);
    get("run_distance", p.run_distance);
    get("landscape_width", p.landscape_width);
    get("landscape_height", p.landscape_height);
    return p;
  }
};

enum class ScenarioKind { RandomMixed, SeparateAreas, OverlappingAreas };

inline std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::RandomMixed: return "random";
    case ScenarioKind::SeparateAreas: return "separate";
    case ScenarioKind::OverlappingAreas: return "overlapping";
  }
  return "?";
}

inline std::optional<ScenarioKind> parse_scenario(std::string_view s) {
  if (s == "random") return ScenarioKind::RandomMixed;
  if (s == "separate") return ScenarioKind::SeparateAreas;
  if (s == "overlapping") return ScenarioKind::OverlappingAreas;
  return std::nullopt;
}

}  // namespace flame::sugarscape
