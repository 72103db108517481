#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "flame/error.hpp"
#include "flame/model.hpp"

namespace flame {

struct ScheduledFunction {
  std::size_t agent_type = 0;  // index into ModelDef::agent_types
  std::size_t function = 0;    // index into AgentTypeSpec::functions
  std::string agent_name;
  std::string function_name;

  friend bool operator==(const ScheduledFunction&, const ScheduledFunction&) = default;
};

/// Functions grouped into layers; every function in a layer only reads
/// messages produced in strictly earlier layers.
struct Schedule {
  std::vector<std::vector<ScheduledFunction>> layers;

  std::size_t layer_of(std::string_view agent, std::string_view function) const {
    for (std::size_t l = 0; l < layers.size(); ++l)
      for (const auto& f : layers[l])
        if (f.agent_name == agent && f.function_name == function) return l;
    fail(ErrorCode::UnknownFunction, std::string(agent) + "::" + std::string(function));
  }
};

/// Places each function at 1 + the deepest layer among producers of its
/// inputs (0 when nothing it reads is produced). Throws CyclicDependency when
/// the message dependency graph has a cycle.
inline Schedule build_schedule(const ModelDef& model) {
  validate(model);

  struct Node {
    std::size_t type, fn;
  };
  std::vector<Node> nodes;
  for (std::size_t t = 0; t < model.agent_types.size(); ++t)
    for (std::size_t f = 0; f < model.agent_types[t].functions.size(); ++f) nodes.push_back({t, f});

  auto spec = [&](const Node& n) -> const FunctionSpec& {
    return model.agent_types[n.type].functions[n.fn];
  };
  auto label = [&](const Node& n) {
    return model.agent_types[n.type].name + "::" + spec(n).name;
  };

  // predecessors[i]: nodes producing some message node i consumes
  std::vector<std::vector<std::size_t>> predecessors(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (const auto& msg : spec(nodes[i]).inputs)
      for (std::size_t j = 0; j < nodes.size(); ++j)
        if (spec(nodes[j]).writes(msg)) predecessors[i].push_back(j);

  enum class Mark { Unvisited, Active, Done };
  std::vector<Mark> mark(nodes.size(), Mark::Unvisited);
  std::vector<std::size_t> depth(nodes.size(), 0);

  // Iterative DFS so deep chains cannot overflow the stack.
  for (std::size_t root = 0; root < nodes.size(); ++root) {
    if (mark[root] != Mark::Unvisited) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    mark[root] = Mark::Active;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < predecessors[node].size()) {
        std::size_t pred = predecessors[node][next++];
        if (mark[pred] == Mark::Active)
          fail(ErrorCode::CyclicDependency, "message cycle through " + label(nodes[pred]) + " and " + label(nodes[node]));
        if (mark[pred] == Mark::Unvisited) {
          mark[pred] = Mark::Active;
          stack.push_back({pred, 0});
        }
        continue;
      }
      std::size_t d = 0;
      for (std::size_t pred : predecessors[node]) d = std::max(d, depth[pred] + 1);
      depth[node] = d;
      mark[node] = Mark::Done;
      stack.pop_back();
    }
  }

  Schedule schedule;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (schedule.layers.size() <= depth[i]) schedule.layers.resize(depth[i] + 1);
    const auto& n = nodes[i];
    schedule.layers[depth[i]].push_back({n.type, n.fn, model.agent_types[n.type].name, spec(n).name});
  }
  return schedule;
}

}  // namespace flame
