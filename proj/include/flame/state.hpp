#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flame/model.hpp"
#include "flame/value.hpp"

namespace flame {

struct AgentInstance {
  std::size_t type = 0;  // index into ModelDef::agent_types
  std::int64_t id = 0;
  Record memory;
  bool alive = true;

  friend bool operator==(const AgentInstance& a, const AgentInstance& b) {
    return a.type == b.type && a.id == b.id && a.alive == b.alive && bit_equal(a.memory, b.memory);
  }
};

/// The population between iterations. Agents keep their initial relative
/// order; dead agents are dropped at the end of the iteration they die in.
struct SimulationState {
  std::int64_t iteration = 0;
  std::vector<AgentInstance> agents;
  std::uint64_t master_seed = 0;

  friend bool operator==(const SimulationState&, const SimulationState&) = default;

  std::int64_t max_id() const {
    std::int64_t m = -1;
    for (const auto& a : agents) m = a.id > m ? a.id : m;
    return m;
  }
};

}  // namespace flame
