#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "flame/engine.hpp"
#include "flame/error.hpp"
#include "flame/exchange.hpp"
#include "flame/model.hpp"
#include "flame/state.hpp"

namespace flame {

enum class Strategy { Serial, Geometric, RoundRobin };

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Serial: return "serial";
    case Strategy::Geometric: return "geometric";
    case Strategy::RoundRobin: return "round-robin";
  }
  return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view s) {
  if (s == "serial") return Strategy::Serial;
  if (s == "geometric") return Strategy::Geometric;
  if (s == "round-robin" || s == "roundrobin" || s == "round_robin") return Strategy::RoundRobin;
  return std::nullopt;
}

struct Bounds {
  double x0 = 0.0, y0 = 0.0, x1 = 200.0, y1 = 200.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }

  friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct Position {
  double x = 0.0, y = 0.0;
};

struct PositionedAgent {
  std::int64_t id = 0;
  std::optional<Position> position;
};

/// Static assignment of agents to partitions, fixed from the initial state.
struct PartitionMap {
  std::uint32_t n_partitions = 1;
  Strategy strategy = Strategy::Serial;
  Bounds bounds;
  std::unordered_map<std::int64_t, std::uint32_t> assignment;

  std::uint32_t partition_of(std::int64_t id) const {
    auto it = assignment.find(id);
    if (it == assignment.end()) fail(ErrorCode::InvalidArgument, "agent " + std::to_string(id) + " is not assigned");
    return it->second;
  }

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> out(n_partitions, 0);
    for (const auto& [id, p] : assignment) ++out[p];
    return out;
  }

  WorkerLayout layout() const {
    WorkerLayout layout;
    layout.n_workers = n_partitions;
    std::int64_t max_id = -1;
    for (const auto& [id, p] : assignment) max_id = std::max(max_id, id);
    if (n_partitions == 1) return layout;
    layout.partition_of.assign(static_cast<std::size_t>(max_id + 1), 0);
    for (const auto& [id, p] : assignment) layout.partition_of[static_cast<std::size_t>(id)] = p;
    return layout;
  }
};

/// The i-th agent in ascending id order goes to partition i mod n.
inline PartitionMap assign_round_robin(std::vector<std::int64_t> agent_ids, std::uint32_t n) {
  if (n == 0) fail(ErrorCode::ZeroPartitions, "round-robin partitioning needs n >= 1");
  std::sort(agent_ids.begin(), agent_ids.end());
  PartitionMap map;
  map.n_partitions = n;
  map.strategy = n == 1 ? Strategy::Serial : Strategy::RoundRobin;
  map.assignment.reserve(agent_ids.size());
  for (std::size_t i = 0; i < agent_ids.size(); ++i)
    map.assignment[agent_ids[i]] = static_cast<std::uint32_t>(i % n);
  return map;
}

namespace detail {

inline std::optional<std::uint32_t> exact_sqrt(std::uint32_t n) {
  auto k = static_cast<std::uint32_t>(std::lround(std::sqrt(static_cast<double>(n))));
  for (std::uint32_t c : {k - 1, k, k + 1})
    if (c > 0 && c * c == n) return c;
  return std::nullopt;
}

inline bool power_of_two(std::uint32_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Index of the half-open slab [edge_i, edge_{i+1}) holding v; the last slab is closed.
inline std::uint32_t slab(double v, double lo, double hi, std::uint32_t k) {
  for (std::uint32_t i = 1; i < k; ++i) {
    const double edge = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k);
    if (v < edge) return i - 1;
  }
  return k - 1;
}

/// Midpoint binary space partition: the longer axis (x on ties) is split
/// first; the low half takes indices [0, n/2), the high half [n/2, n).
inline std::uint32_t bsp_cell(double x, double y, Bounds b, std::uint32_t n) {
  std::uint32_t base = 0;
  while (n > 1) {
    n /= 2;
    if (b.width() >= b.height()) {
      const double mid = (b.x0 + b.x1) / 2.0;
      if (x < mid) {
        b.x1 = mid;
      } else {
        b.x0 = mid;
        base += n;
      }
    } else {
      const double mid = (b.y0 + b.y1) / 2.0;
      if (y < mid) {
        b.y1 = mid;
      } else {
        b.y0 = mid;
        base += n;
      }
    }
  }
  return base;
}

}  // namespace detail

inline bool geometric_count_supported(std::uint32_t n) {
  return n >= 1 && (detail::exact_sqrt(n) || detail::power_of_two(n));
}

/// Cell of a point among n geometric partitions of `bounds`. A perfect
/// square n = k*k gives a k x k grid numbered row-major from the bottom-left
/// (index = row * k + col); other powers of two use midpoint BSP.
inline std::uint32_t geometric_cell(double x, double y, const Bounds& bounds, std::uint32_t n) {
  if (n == 0) fail(ErrorCode::ZeroPartitions, "geometric partitioning needs n >= 1");
  if (auto k = detail::exact_sqrt(n)) {
    const auto col = detail::slab(x, bounds.x0, bounds.x1, *k);
    const auto row = detail::slab(y, bounds.y0, bounds.y1, *k);
    return row * *k + col;
  }
  if (detail::power_of_two(n)) return detail::bsp_cell(x, y, bounds, n);
  fail(ErrorCode::UnsupportedCount, std::to_string(n) + " is neither a perfect square nor a power of two");
}

inline PartitionMap assign_geometric(const std::vector<PositionedAgent>& agents, std::uint32_t n, const Bounds& bounds) {
  if (n == 0) fail(ErrorCode::ZeroPartitions, "geometric partitioning needs n >= 1");
  if (!geometric_count_supported(n))
    fail(ErrorCode::UnsupportedCount, std::to_string(n) + " is neither a perfect square nor a power of two");
  PartitionMap map;
  map.n_partitions = n;
  map.strategy = n == 1 ? Strategy::Serial : Strategy::Geometric;
  map.bounds = bounds;
  map.assignment.reserve(agents.size());
  for (const auto& a : agents) {
    if (!a.position) fail(ErrorCode::PositionlessAgent, "agent " + std::to_string(a.id) + " has no x/y");
    if (!bounds.contains(a.position->x, a.position->y))
      fail(ErrorCode::InvalidArgument, "agent " + std::to_string(a.id) + " lies outside the partition bounds");
    map.assignment[a.id] = geometric_cell(a.position->x, a.position->y, bounds, n);
  }
  return map;
}

/// Agents of `sim` with their (x, y) when their type has real x and y fields.
inline std::vector<PositionedAgent> positions_of(const SimulationState& sim, const ModelDef& model) {
  std::vector<PositionedAgent> out;
  out.reserve(sim.agents.size());
  for (const auto& a : sim.agents) {
    const auto& layout = model.agent_types[a.type].memory;
    auto xi = find_field(layout, "x");
    auto yi = find_field(layout, "y");
    PositionedAgent p{a.id, std::nullopt};
    if (xi && yi && layout[*xi].kind == ScalarKind::Real && layout[*yi].kind == ScalarKind::Real)
      p.position = Position{std::get<double>(a.memory[*xi]), std::get<double>(a.memory[*yi])};
    out.push_back(p);
  }
  return out;
}

/// Partitions a whole population. Under Geometric, agents without a position
/// (bookkeeping agents) are spread round-robin in id order.
inline PartitionMap partition_state(const SimulationState& sim, const ModelDef& model, Strategy strategy,
                                    std::uint32_t n, const Bounds& bounds) {
  if (n == 0) fail(ErrorCode::ZeroPartitions, "need n >= 1");
  if (strategy == Strategy::Serial) {
    if (n != 1) fail(ErrorCode::InvalidArgument, "serial runs use exactly one partition");
    std::vector<std::int64_t> ids;
    for (const auto& a : sim.agents) ids.push_back(a.id);
    return assign_round_robin(std::move(ids), 1);
  }
  if (strategy == Strategy::RoundRobin) {
    std::vector<std::int64_t> ids;
    for (const auto& a : sim.agents) ids.push_back(a.id);
    auto map = assign_round_robin(std::move(ids), n);
    map.strategy = Strategy::RoundRobin;
    return map;
  }
  std::vector<PositionedAgent> positioned;
  std::vector<std::int64_t> positionless;
  for (const auto& p : positions_of(sim, model)) {
    if (p.position)
      positioned.push_back(p);
    else
      positionless.push_back(p.id);
  }
  auto map = assign_geometric(positioned, n, bounds);
  map.strategy = Strategy::Geometric;
  auto rest = assign_round_robin(std::move(positionless), n);
  map.assignment.insert(rest.assignment.begin(), rest.assignment.end());
  return map;
}

/// Per-layer communication counters accumulated over a run.
struct ExchangeMetrics {
  std::vector<LayerExchange> rows;

  void add(const IterationStats& stats) { rows.insert(rows.end(), stats.layers.begin(), stats.layers.end()); }

  std::int64_t cross_partition_deliveries() const {
    std::int64_t n = 0;
    for (const auto& r : rows) n += r.cross_partition_deliveries;
    return n;
  }
  std::int64_t local_deliveries() const {
    std::int64_t n = 0;
    for (const auto& r : rows) n += r.local_deliveries;
    return n;
  }
  std::int64_t messages_posted() const {
    std::int64_t n = 0;
    for (const auto& r : rows) n += r.messages_posted;
    return n;
  }
};

inline void write_metrics_csv(std::ostream& os, const ExchangeMetrics& metrics) {
  os << "iteration,layer,messages_posted,local_deliveries,cross_partition_deliveries\n";
  for (const auto& r : metrics.rows)
    os << r.iteration << ',' << r.layer << ',' << r.messages_posted << ',' << r.local_deliveries << ','
       << r.cross_partition_deliveries << '\n';
}

}  // namespace flame
