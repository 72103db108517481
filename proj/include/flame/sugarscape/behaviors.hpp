#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>

#include "flame/engine.hpp"
#include "flame/model.hpp"
#include "flame/partition.hpp"
#include "flame/sugarscape/params.hpp"

namespace flame::sugarscape {

/// Approaching citizens stop this fraction inside the eating radius so the
/// next iteration's distance test cannot fail on rounding.
inline constexpr double kApproachInset = 1e-9;

/// Moves by (dx, dy), clamped to the landscape, shrinking the step until the
/// measured displacement hypot(to - from) is within `limit`.
inline Position bounded_move(Position from, double dx, double dy, double limit, const Bounds& b) {
  double scale = 1.0;
  for (;;) {
    Position to{std::clamp(from.x + dx * scale, b.x0, b.x1), std::clamp(from.y + dy * scale, b.y0, b.y1)};
    if (std::hypot(to.x - from.x, to.y - from.y) <= limit) return to;
    scale -= 0x1.0p-48;
  }
}

/// Step towards a sugar `distance` away: a full run, or just enough to end
/// inside the eating radius when a full run would overshoot.
inline Position approach(Position from, Position target, const ModelParams& p) {
  const double dx = target.x - from.x;
  const double dy = target.y - from.y;
  const double d = std::hypot(dx, dy);
  const double step = std::min(p.run_distance, d - p.eating_distance * (1.0 - kApproachInset));
  return bounded_move(from, dx / d * step, dy / d * step, p.run_distance, p.bounds());
}

/// A run in direction `angle` (radians), clamped to the landscape.
inline Position random_step(Position from, double angle, const ModelParams& p) {
  return bounded_move(from, p.run_distance * std::cos(angle), p.run_distance * std::sin(angle), p.run_distance,
                      p.bounds());
}

/// Field and message indices resolved once against a model.
struct Bindings {
  ModelParams params;

  struct {
    std::size_t id, x, y, collected, flag, scene;
  } citizen{};
  struct {
    std::size_t id, x, y, scene;
  } sugar{};
  struct {
    std::size_t scene, mean, max, total;
  } averager{};
  bool has_averager = false;

  std::size_t location = 0, request = 0, eaten = 0;
  std::optional<std::size_t> report;

  explicit Bindings(const ModelDef& model) : params(ModelParams::from_model(model)) {
    params.validate();
    auto field = [&](std::string_view type, std::string_view name) {
      const auto& layout = model.agent_type(type).memory;
      auto i = find_field(layout, name);
      if (!i) fail(ErrorCode::MissingField, std::string(type) + "." + std::string(name));
      return *i;
    };
    citizen = {field("Citizen", "id"),
               field("Citizen", "x"),
               field("Citizen", "y"),
               field("Citizen", "sugars_collected"),
               field("Citizen", "flag_sugar_collected"),
               field("Citizen", "scene_id")};
    sugar = {field("Sugar", "id"), field("Sugar", "x"), field("Sugar", "y"), field("Sugar", "scene_id")};
    if (model.agent_type_index("Averager")) {
      has_averager = true;
      averager = {field("Averager", "scene_id"), field("Averager", "mean_collected"),
                  field("Averager", "max_collected"), field("Averager", "total_collected")};
    }
    auto message = [&](std::string_view name) {
      auto i = model.message_type_index(name);
      if (!i) fail(ErrorCode::UnknownMessageType, std::string(name));
      return *i;
    };
    location = message("location");
    request = message("request");
    eaten = message("eaten");
    report = model.message_type_index("report");

    // Behaviors build and read payloads positionally.
    using K = ScalarKind;
    auto expect = [&](std::size_t type, const Layout& layout) {
      if (model.message_types[type].payload != layout)
        fail(ErrorCode::PayloadMismatch, "message '" + model.message_types[type].name + "' has an unexpected layout");
    };
    expect(location, {{"id", K::Integer}, {"x", K::Real}, {"y", K::Real}, {"scene_id", K::Integer}});
    expect(request, {{"sugar_id", K::Integer}, {"citizen_id", K::Integer}, {"scene_id", K::Integer}});
    expect(eaten, {{"citizen_id", K::Integer}, {"x", K::Real}, {"y", K::Real}, {"scene_id", K::Integer}});
    if (report)
      expect(*report, {{"citizen_id", K::Integer}, {"sugars_collected", K::Integer}, {"scene_id", K::Integer}});
  }
};

/// Posts (id, x, y, scene_id) so citizens can find this sugar.
inline Outcome sugar_post_location(AgentContext& ctx, const Bindings& b) {
  const auto& m = ctx.memory();
  ctx.post(b.location, {m[b.sugar.id], m[b.sugar.x], m[b.sugar.y], m[b.sugar.scene]});
  return Outcome::Survive;
}

/// Looks for the nearest visible sugar of the own scene (ties: lowest id).
/// Within eating range it requests the sugar and stays put; otherwise it
/// walks towards it, or wanders randomly when nothing is in view.
inline Outcome citizen_find_and_request(AgentContext& ctx, const Bindings& b) {
  auto& m = ctx.memory();
  const auto& p = b.params;
  const Position here{std::get<double>(m[b.citizen.x]), std::get<double>(m[b.citizen.y])};
  const std::int64_t scene = as_int(m[b.citizen.scene]);

  const Message* nearest = nullptr;
  double best = std::numeric_limits<double>::infinity();
  std::int64_t best_id = 0;
  ctx.read(b.location, MessageFilter{}.scene(scene).within(here.x, here.y, p.viewing_distance),
           [&](const Message& msg) {
             const double dx = std::get<double>(msg.payload[1]) - here.x;
             const double dy = std::get<double>(msg.payload[2]) - here.y;
             const double d2 = dx * dx + dy * dy;
             const std::int64_t id = as_int(msg.payload[0]);
             if (d2 < best || (d2 == best && id < best_id)) {
               best = d2;
               best_id = id;
               nearest = &msg;
             }
           });

  Position next = here;
  if (nearest && best <= p.eating_distance * p.eating_distance) {
    ctx.post(b.request, {Value{best_id}, m[b.citizen.id], Value{scene}});
    m[b.citizen.flag] = std::int64_t{1};
    return Outcome::Survive;
  }
  if (nearest) {
    next = approach(here, {std::get<double>(nearest->payload[1]), std::get<double>(nearest->payload[2])}, p);
  } else {
    next = random_step(here, 2.0 * std::numbers::pi * ctx.rng().uniform(), p);
  }
  m[b.citizen.x] = next.x;
  m[b.citizen.y] = next.y;
  return Outcome::Survive;
}

/// Grants this sugar to the lowest-id requester of its scene and dies;
/// survives untouched when nobody asked for it.
inline Outcome sugar_check_eaten(AgentContext& ctx, const Bindings& b) {
  const auto& m = ctx.memory();
  std::optional<std::int64_t> winner;
  ctx.read(b.request, MessageFilter{}.scene(as_int(m[b.sugar.scene])).where("sugar_id", as_int(m[b.sugar.id])),
           [&](const Message& msg) {
             const std::int64_t citizen = as_int(msg.payload[1]);
             if (!winner || citizen < *winner) winner = citizen;
           });
  if (!winner) return Outcome::Survive;
  ctx.post(b.eaten, {Value{*winner}, m[b.sugar.x], m[b.sugar.y], m[b.sugar.scene]});
  return Outcome::Die;
}

/// Credits granted sugar, clears the pending flag and, when the model wires
/// an Averager, reports the running total.
inline Outcome citizen_confirm_eaten(AgentContext& ctx, const Bindings& b) {
  auto& m = ctx.memory();
  const std::int64_t scene = as_int(m[b.citizen.scene]);
  const auto granted =
      ctx.read(b.eaten, MessageFilter{}.scene(scene).where("citizen_id", as_int(m[b.citizen.id])), [](const Message&) {});
  m[b.citizen.collected] = as_int(m[b.citizen.collected]) + static_cast<std::int64_t>(granted);
  m[b.citizen.flag] = std::int64_t{0};
  if (b.report && ctx.declares_output(*b.report))
    ctx.post(*b.report, {m[b.citizen.id], m[b.citizen.collected], Value{scene}});
  return Outcome::Survive;
}

/// Mean, max and total of the scene's reports; all zero for an empty scene.
inline Outcome averager_collect(AgentContext& ctx, const Bindings& b) {
  auto& m = ctx.memory();
  std::int64_t n = 0, total = 0, max = 0;
  ctx.read(*b.report, MessageFilter{}.scene(as_int(m[b.averager.scene])), [&](const Message& msg) {
    const std::int64_t v = as_int(msg.payload[1]);
    ++n;
    total += v;
    max = std::max(max, v);
  });
  m[b.averager.mean] = n == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(n);
  m[b.averager.max] = max;
  m[b.averager.total] = total;
  return Outcome::Survive;
}

/// Behavior table for a Sugarscape model; parameters come from the model's
/// environment constants.
inline BehaviorTable make_behaviors(const ModelDef& model) {
  auto b = std::make_shared<const Bindings>(model);
  BehaviorTable table;
  table.bind("Sugar", "post_location", [b](AgentContext& c) { return sugar_post_location(c, *b); });
  table.bind("Citizen", "find_and_request", [b](AgentContext& c) { return citizen_find_and_request(c, *b); });
  table.bind("Sugar", "check_eaten", [b](AgentContext& c) { return sugar_check_eaten(c, *b); });
  table.bind("Citizen", "confirm_eaten", [b](AgentContext& c) { return citizen_confirm_eaten(c, *b); });
  if (b->has_averager && b->report)
    table.bind("Averager", "collect", [b](AgentContext& c) { return averager_collect(c, *b); });
  return table;
}

}  // namespace flame::sugarscape
