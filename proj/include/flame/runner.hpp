#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <utility>

#include "flame/engine.hpp"
#include "flame/partition.hpp"

namespace flame {

struct RunOptions {
  Strategy strategy = Strategy::Serial;
  std::uint32_t partitions = 1;
  std::int64_t iterations = 1;
  Bounds bounds;
  /// Called after every iteration with the updated simulation.
  std::function<void(const Simulation&, const IterationStats&)> on_iteration;
  BarrierObserver on_barrier;
};

struct RunResult {
  SimulationState final_state;
  PartitionMap partitions;
  ExchangeMetrics metrics;
  double wall_seconds = 0.0;
};

/// Partitions the initial population once (static assignment) and runs
/// `options.iterations` iterations.
inline RunResult run_model(const ModelDef& model, const BehaviorTable& behaviors, SimulationState initial,
                           const RunOptions& options) {
  RunResult result;
  result.partitions = partition_state(initial, model, options.strategy, options.partitions, options.bounds);
  Simulation sim(model, behaviors, std::move(initial), result.partitions.layout());
  const auto start = std::chrono::steady_clock::now();
  for (std::int64_t i = 0; i < options.iterations; ++i) {
    auto stats = sim.step(options.on_barrier);
    result.metrics.add(stats);
    if (options.on_iteration) options.on_iteration(sim, stats);
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.final_state = sim.state();
  return result;
}

}  // namespace flame
