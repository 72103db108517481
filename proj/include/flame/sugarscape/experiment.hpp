#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "flame/analytics.hpp"
#include "flame/digest.hpp"
#include "flame/io/xml.hpp"
#include "flame/runner.hpp"
#include "flame/sugarscape/behaviors.hpp"
#include "flame/sugarscape/model.hpp"
#include "flame/sugarscape/scenario.hpp"

namespace flame::sugarscape {

/// Checks the model's conservation laws after every iteration of a run.
/// Violations are collected as text rather than thrown so a whole run can be
/// audited.
class InvariantMonitor {
 public:
  InvariantMonitor(const ModelDef& model, const ModelParams& params, const SimulationState& initial)
      : params_(params), citizen_(model.agent_type_index("Citizen")), sugar_(model.agent_type_index("Sugar")) {
    if (citizen_) {
      const auto& l = model.agent_types[*citizen_].memory;
      cx_ = *find_field(l, "x");
      cy_ = *find_field(l, "y");
      ccol_ = *find_field(l, "sugars_collected");
      cflag_ = *find_field(l, "flag_sugar_collected");
    }
    if (sugar_) {
      const auto& l = model.agent_types[*sugar_].memory;
      sx_ = *find_field(l, "x");
      sy_ = *find_field(l, "y");
    }
    eaten_ = model.message_type_index("eaten");
    snapshot(initial);
    for (const auto& [scene, t] : scene_tallies(initial, model)) budget_[scene] = t.collected + t.alive_sugars;
  }

  /// Use as the run's barrier observer to audit eaten messages.
  void on_barrier(const MessageBoard& board) {
    if (!eaten_) return;
    for (const auto& m : board.messages(*eaten_)) {
      if (!seen_layer_messages_.insert({m.sender_id, m.seq, iteration_}).second) continue;
      if (!granted_.insert(m.sender_id).second)
        violation("sugar " + std::to_string(m.sender_id) + " granted more than once");
    }
  }

  void after_iteration(const SimulationState& sim, const ModelDef& model) {
    ++iteration_;
    for (const auto& [scene, t] : scene_tallies(sim, model)) {
      if (t.collected + t.alive_sugars != budget_[scene])
        violation("scene " + std::to_string(scene) + ": collected + alive sugars = " +
                  std::to_string(t.collected + t.alive_sugars) + ", expected " + std::to_string(budget_[scene]));
    }
    std::int64_t alive_sugars = 0;
    for (const auto& a : sim.agents) {
      if (citizen_ && a.type == *citizen_) {
        auto it = citizens_.find(a.id);
        const double x = std::get<double>(a.memory[cx_]);
        const double y = std::get<double>(a.memory[cy_]);
        const auto collected = as_int(a.memory[ccol_]);
        const auto flag = as_int(a.memory[cflag_]);
        if (it != citizens_.end()) {
          const double moved = std::hypot(x - it->second.x, y - it->second.y);
          max_displacement_ = std::max(max_displacement_, moved);
          if (moved > params_.run_distance)
            violation("citizen " + std::to_string(a.id) + " moved " + io::format_real(moved));
          if (collected < it->second.collected)
            violation("citizen " + std::to_string(a.id) + " lost collected sugar");
        }
        if (flag != 0 && flag != 1) violation("citizen " + std::to_string(a.id) + " has flag " + std::to_string(flag));
        if (x < 0 || y < 0 || x > params_.landscape_width || y > params_.landscape_height)
          violation("citizen " + std::to_string(a.id) + " left the landscape");
      } else if (sugar_ && a.type == *sugar_) {
        ++alive_sugars;
        auto it = sugars_.find(a.id);
        if (it == sugars_.end() || std::get<double>(a.memory[sx_]) != it->second.x ||
            std::get<double>(a.memory[sy_]) != it->second.y)
          violation("sugar " + std::to_string(a.id) + " moved");
      }
    }
    if (alive_sugars > alive_sugars_) violation("alive sugar count increased");
    snapshot(sim);
  }

  bool ok() const { return violations_.empty(); }
  const std::vector<std::string>& violations() const { return violations_; }
  std::size_t grants() const { return granted_.size(); }
  double max_displacement() const { return max_displacement_; }

 private:
  struct CitizenTrace {
    double x, y;
    std::int64_t collected;
  };

  void snapshot(const SimulationState& sim) {
    citizens_.clear();
    sugars_.clear();
    alive_sugars_ = 0;
    for (const auto& a : sim.agents) {
      if (citizen_ && a.type == *citizen_)
        citizens_[a.id] = {std::get<double>(a.memory[cx_]), std::get<double>(a.memory[cy_]), as_int(a.memory[ccol_])};
      else if (sugar_ && a.type == *sugar_) {
        sugars_[a.id] = {std::get<double>(a.memory[sx_]), std::get<double>(a.memory[sy_])};
        ++alive_sugars_;
      }
    }
  }

  void violation(std::string what) {
    if (violations_.size() < 50) violations_.push_back(std::move(what));
  }

  ModelParams params_;
  std::optional<std::size_t> citizen_, sugar_, eaten_;
  std::size_t cx_ = 0, cy_ = 0, ccol_ = 0, cflag_ = 0, sx_ = 0, sy_ = 0;
  std::int64_t iteration_ = 0;
  std::map<std::int64_t, std::int64_t> budget_;
  std::map<std::int64_t, CitizenTrace> citizens_;
  std::map<std::int64_t, Position> sugars_;
  std::int64_t alive_sugars_ = 0;
  std::set<std::int64_t> granted_;
  std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> seen_layer_messages_;
  std::vector<std::string> violations_;
  double max_displacement_ = 0.0;
};

struct ExperimentConfig {
  ScenarioKind scenario = ScenarioKind::RandomMixed;
  ModelParams params;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::Serial;
  std::uint32_t partitions = 1;
  std::int64_t iterations = 1;
  bool audit = false;
  /// Fraction of a scene's sugar that counts as "captured".
  double capture_fraction = 0.9;
};

struct ExperimentResult {
  RunResult run;
  std::string final_snapshot;  // canonical bytes of <iterations>.xml
  std::string sha256;
  std::vector<std::int64_t> wealth;
  std::optional<analytics::MomentStats> moments;
  /// Mean over scenes of the first iteration count at which the scene's
  /// captured share reached capture_fraction; scenes that never get there
  /// count as iterations + 1.
  double capture_iterations = 0.0;
  std::vector<std::string> violations;
  double max_displacement = 0.0;
};

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const auto model = builtin_model(cfg.params);
  const auto behaviors = make_behaviors(model);
  auto initial = io::to_state(gen_scenario(cfg.scenario, cfg.params, cfg.seed), model, cfg.seed);

  std::optional<InvariantMonitor> monitor;
  if (cfg.audit) monitor.emplace(model, cfg.params, initial);

  const auto need = static_cast<std::int64_t>(std::ceil(cfg.capture_fraction * static_cast<double>(cfg.params.sugars_per_scene) - 1e-9));
  std::map<std::int64_t, std::int64_t> reached;  // scene -> iteration count

  RunOptions opts;
  opts.strategy = cfg.strategy;
  opts.partitions = cfg.partitions;
  opts.iterations = cfg.iterations;
  opts.bounds = cfg.params.bounds();
  if (monitor) opts.on_barrier = [&](std::int64_t, std::size_t, const MessageBoard& b) { monitor->on_barrier(b); };
  std::int64_t done = 0;
  opts.on_iteration = [&](const Simulation& sim, const IterationStats&) {
    ++done;
    if (monitor) monitor->after_iteration(sim.state(), model);
    for (const auto& [scene, t] : scene_tallies(sim.state(), model))
      if (t.collected >= need && !reached.count(scene)) reached[scene] = done;
  };

  ExperimentResult out;
  out.run = run_model(model, behaviors, std::move(initial), opts);
  out.final_snapshot = io::format_snapshot(io::to_snapshot(out.run.final_state, model), model);
  out.sha256 = sha256_hex(out.final_snapshot);
  out.wealth = wealth_values(out.run.final_state, model);
  try {
    out.moments = analytics::moments(out.wealth);
  } catch (const Error&) {
    out.moments.reset();
  }
  double sum = 0.0;
  for (std::int64_t s = 0; s < cfg.params.n_scenes; ++s) {
    auto it = reached.find(s);
    sum += static_cast<double>(it == reached.end() ? cfg.iterations + 1 : it->second);
  }
  out.capture_iterations = sum / static_cast<double>(cfg.params.n_scenes);
  if (monitor) {
    out.violations = monitor->violations();
    out.max_displacement = monitor->max_displacement();
  }
  return out;
}

}  // namespace flame::sugarscape
