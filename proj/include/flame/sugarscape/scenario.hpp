#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "flame/io/xml.hpp"
#include "flame/rng.hpp"
#include "flame/sugarscape/params.hpp"

namespace flame::sugarscape {

struct Region {
  double x0, y0, x1, y1;

  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

struct ScenarioRegions {
  Region citizens;
  Region sugars;
};

/// Where each population is placed, as fractions of the landscape. On the
/// default 200 x 200 landscape:
///   random      both populations over [0,200]^2
///   separate    citizens [0,60]^2,  sugars [140,200]^2
///   overlapping citizens [0,120]^2, sugars [80,200]^2 (shared square [80,120]^2)
inline ScenarioRegions regions(ScenarioKind kind, const ModelParams& p) {
  const double w = p.landscape_width;
  const double h = p.landscape_height;
  auto box = [&](int lo, int hi) {  // tenths of the landscape
    return Region{w * lo / 10, h * lo / 10, w * hi / 10, h * hi / 10};
  };
  switch (kind) {
    case ScenarioKind::RandomMixed: return {box(0, 10), box(0, 10)};
    case ScenarioKind::SeparateAreas: return {box(0, 3), box(7, 10)};
    case ScenarioKind::OverlappingAreas: return {box(0, 6), box(4, 10)};
  }
  return {box(0, 10), box(0, 10)};
}

/// Stream used to place agent `id` in the initial state; iteration -1 is
/// reserved for generation so it never collides with a simulation stream.
inline AgentRng placement_rng(std::uint64_t seed, std::int64_t id) { return AgentRng(seed, id, -1); }

/// Builds the iteration-0 state. File order (and therefore agent ids) is
/// scene by scene, citizens then sugars, followed by one Averager per scene.
inline io::SnapshotDoc gen_scenario(ScenarioKind kind, const ModelParams& params, std::uint64_t master_seed) {
  params.validate();
  const auto r = regions(kind, params);
  io::SnapshotDoc doc;
  doc.iteration_number = 0;
  doc.agents.reserve(static_cast<std::size_t>(params.n_scenes * (params.citizens_per_scene + params.sugars_per_scene + 1)));

  std::int64_t id = 0;
  auto draw = [&](const Region& region) {
    auto rng = placement_rng(master_seed, id);
    const double x = region.x0 + (region.x1 - region.x0) * rng.uniform();
    const double y = region.y0 + (region.y1 - region.y0) * rng.uniform();
    return std::pair{x, y};
  };
  for (std::int64_t scene = 0; scene < params.n_scenes; ++scene) {
    for (std::int64_t i = 0; i < params.citizens_per_scene; ++i, ++id) {
      auto [x, y] = draw(r.citizens);
      doc.agents.push_back({"Citizen", {Value{id}, Value{std::int64_t{0}}, Value{x}, Value{y}, Value{std::int64_t{0}},
                                        Value{std::int64_t{0}}, Value{scene}}});
    }
    for (std::int64_t i = 0; i < params.sugars_per_scene; ++i, ++id) {
      auto [x, y] = draw(r.sugars);
      doc.agents.push_back({"Sugar", {Value{id}, Value{x}, Value{y}, Value{scene}}});
    }
  }
  for (std::int64_t scene = 0; scene < params.n_scenes; ++scene, ++id)
    doc.agents.push_back({"Averager", {Value{scene}, Value{0.0}, Value{std::int64_t{0}}, Value{std::int64_t{0}}}});
  return doc;
}

/// Per-scene bookkeeping read straight from the population.
struct SceneTally {
  std::int64_t citizens = 0;
  std::int64_t collected = 0;
  std::int64_t alive_sugars = 0;
};

inline std::map<std::int64_t, SceneTally> scene_tallies(const SimulationState& sim, const ModelDef& model) {
  std::map<std::int64_t, SceneTally> out;
  const auto citizen = model.agent_type_index("Citizen");
  const auto sugar = model.agent_type_index("Sugar");
  for (const auto& a : sim.agents) {
    const auto& layout = model.agent_types[a.type].memory;
    if (citizen && a.type == *citizen) {
      auto& t = out[as_int(a.memory[*find_field(layout, "scene_id")])];
      ++t.citizens;
      t.collected += as_int(a.memory[*find_field(layout, "sugars_collected")]);
    } else if (sugar && a.type == *sugar) {
      ++out[as_int(a.memory[*find_field(layout, "scene_id")])].alive_sugars;
    }
  }
  return out;
}

/// sugars_collected of every citizen, pooled over scenes, in agent order.
inline std::vector<std::int64_t> wealth_values(const SimulationState& sim, const ModelDef& model) {
  std::vector<std::int64_t> out;
  const auto citizen = model.agent_type_index("Citizen");
  if (!citizen) return out;
  const auto idx = find_field(model.agent_types[*citizen].memory, "sugars_collected");
  if (!idx) fail(ErrorCode::MissingField, "Citizen.sugars_collected");
  for (const auto& a : sim.agents)
    if (a.type == *citizen) out.push_back(as_int(a.memory[*idx]));
  return out;
}

inline std::vector<std::int64_t> wealth_values(const io::SnapshotDoc& doc, const ModelDef& model) {
  return wealth_values(io::to_state(doc, model, 0), model);
}

}  // namespace flame::sugarscape
