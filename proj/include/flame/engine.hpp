#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "flame/board.hpp"
#include "flame/error.hpp"
#include "flame/exchange.hpp"
#include "flame/model.hpp"
#include "flame/rng.hpp"
#include "flame/schedule.hpp"
#include "flame/state.hpp"

namespace flame {

enum class Outcome { Survive, Die };

class AgentContext;

/// An agent transition function. It may only change the memory of the agent
/// it is called for and communicates exclusively through the context.
using AgentFunction = std::function<Outcome(AgentContext&)>;

/// Maps (agent type, function name) to the code implementing it.
class BehaviorTable {
 public:
  void bind(std::string agent, std::string function, AgentFunction fn) {
    table_[{std::move(agent), std::move(function)}] = std::move(fn);
  }
  const AgentFunction* find(const std::string& agent, const std::string& function) const {
    auto it = table_.find({agent, function});
    return it == table_.end() ? nullptr : &it->second;
  }

 private:
  std::map<std::pair<std::string, std::string>, AgentFunction> table_;
};

/// Which worker (partition) owns each agent. `partition_of` is indexed by
/// agent id; an empty vector puts every agent on worker 0.
struct WorkerLayout {
  std::uint32_t n_workers = 1;
  std::vector<std::uint32_t> partition_of;

  std::uint32_t worker_of(std::int64_t id) const {
    if (partition_of.empty()) return 0;
    return partition_of.at(static_cast<std::size_t>(id));
  }
};

struct BoundFunction {
  std::size_t agent_type = 0;
  const FunctionSpec* spec = nullptr;
  const AgentFunction* fn = nullptr;
  std::vector<bool> reads;   // by message type index
  std::vector<bool> writes;  // by message type index
};

using BoundSchedule = std::vector<std::vector<BoundFunction>>;

inline BoundSchedule bind_schedule(const ModelDef& model, const Schedule& schedule, const BehaviorTable& behaviors) {
  BoundSchedule out;
  for (const auto& layer : schedule.layers) {
    auto& bound_layer = out.emplace_back();
    for (const auto& sf : layer) {
      BoundFunction b;
      b.agent_type = sf.agent_type;
      b.spec = &model.agent_types[sf.agent_type].functions[sf.function];
      b.fn = behaviors.find(sf.agent_name, sf.function_name);
      if (!b.fn || !*b.fn) fail(ErrorCode::UnknownFunction, "no behavior bound for " + sf.agent_name + "::" + sf.function_name);
      b.reads.assign(model.message_types.size(), false);
      b.writes.assign(model.message_types.size(), false);
      for (std::size_t m = 0; m < model.message_types.size(); ++m) {
        b.reads[m] = b.spec->reads(model.message_types[m].name);
        b.writes[m] = b.spec->writes(model.message_types[m].name);
      }
      bound_layer.push_back(std::move(b));
    }
  }
  return out;
}

/// Everything an agent function can see: its own memory, the board as of
/// the last barrier, a post buffer, and its private random stream.
class AgentContext {
 public:
  AgentContext(const ModelDef& model, const MessageBoard& board, AgentInstance& agent, const BoundFunction& fn,
               std::int64_t iteration, std::uint64_t master_seed, PostBuffer& posts, std::int64_t& seq,
               DeliveryTally& tally, const WorkerLayout& layout, std::uint32_t worker)
      : model_(model), board_(board), agent_(agent), fn_(fn), iteration_(iteration), master_seed_(master_seed),
        posts_(posts), seq_(seq), tally_(tally), layout_(layout), worker_(worker) {}

  const ModelDef& model() const { return model_; }
  const AgentTypeSpec& type() const { return model_.agent_types[agent_.type]; }
  const FunctionSpec& function() const { return *fn_.spec; }
  std::int64_t id() const { return agent_.id; }
  std::int64_t iteration() const { return iteration_; }
  Record& memory() { return agent_.memory; }
  const Record& memory() const { return agent_.memory; }

  AgentRng& rng() {
    if (!rng_) rng_.emplace(master_seed_, agent_.id, iteration_);
    return *rng_;
  }

  std::size_t message_type(std::string_view name) const { return board_.type_index(name); }
  bool declares_output(std::size_t type) const { return type < fn_.writes.size() && fn_.writes[type]; }

  /// Visits matching messages in canonical order; each match counts as one
  /// delivery (local or cross-partition).
  template <class Fn>
  std::size_t read(std::size_t type, const MessageFilter& filter, Fn&& fn) {
    if (type >= fn_.reads.size() || !fn_.reads[type])
      fail(ErrorCode::UndeclaredInput, function().name + " does not declare input '" + board_.spec(type).name + "'");
    return board_.visit(type, filter, [&](const Message& m) {
      tally_.record(layout_.worker_of(m.sender_id), worker_);
      fn(m);
    });
  }

  std::vector<Message> read(std::string_view type, const MessageFilter& filter = {}) {
    std::vector<Message> out;
    read(message_type(type), filter, [&](const Message& m) { out.push_back(m); });
    return out;
  }

  void post(std::size_t type, Record payload) {
    if (!declares_output(type))
      fail(ErrorCode::UndeclaredOutput, function().name + " does not declare output '" + board_.spec(type).name + "'");
    Message msg{type, agent_.id, seq_++, std::move(payload)};
    board_.check_payload(msg);
    posts_.push(std::move(msg));
  }

  void post(std::string_view type, Record payload) { post(message_type(type), std::move(payload)); }

 private:
  const ModelDef& model_;
  const MessageBoard& board_;
  AgentInstance& agent_;
  const BoundFunction& fn_;
  std::int64_t iteration_;
  std::uint64_t master_seed_;
  PostBuffer& posts_;
  std::int64_t& seq_;
  DeliveryTally& tally_;
  const WorkerLayout& layout_;
  std::uint32_t worker_;
  std::optional<AgentRng> rng_;
};

struct IterationStats {
  std::int64_t iteration = 0;  // the iteration that was executed
  std::vector<std::int64_t> alive_by_type;
  std::vector<std::int64_t> posted_by_type;
  std::vector<LayerExchange> layers;

  std::int64_t cross_partition_deliveries() const {
    std::int64_t n = 0;
    for (const auto& l : layers) n += l.cross_partition_deliveries;
    return n;
  }
  std::int64_t total_deliveries() const {
    std::int64_t n = 0;
    for (const auto& l : layers) n += l.total_deliveries();
    return n;
  }

  friend bool operator==(const IterationStats&, const IterationStats&) = default;
};

inline void write_stats_header(std::ostream& os, const ModelDef& model) {
  os << "iteration";
  for (const auto& a : model.agent_types) os << ",alive_" << a.name;
  for (const auto& m : model.message_types) os << ",posted_" << m.name;
  os << '\n';
}

inline void write_stats_row(std::ostream& os, const IterationStats& stats) {
  os << stats.iteration;
  for (auto n : stats.alive_by_type) os << ',' << n;
  for (auto n : stats.posted_by_type) os << ',' << n;
  os << '\n';
}

/// Called after every layer barrier with the merged board.
using BarrierObserver = std::function<void(std::int64_t iteration, std::size_t layer, const MessageBoard&)>;

/// Runs one iteration: layers in order, each worker processing its own
/// agents against the board as of the previous barrier, posts merged at the
/// barrier. Agents that die are skipped for the rest of the iteration and
/// removed at its end. The board lives for this iteration only.
inline IterationStats run_iteration(SimulationState& sim, const ModelDef& model, const BoundSchedule& schedule,
                                    const WorkerLayout& layout = {}, const BarrierObserver& observer = {}) {
  const std::uint32_t n_workers = std::max<std::uint32_t>(1, layout.n_workers);
  const std::size_t n_types = model.agent_types.size();
  const std::int64_t t = sim.iteration;

  // slots[worker][type] -> indices into sim.agents
  std::vector<std::vector<std::vector<std::size_t>>> slots(n_workers, std::vector<std::vector<std::size_t>>(n_types));
  for (std::size_t i = 0; i < sim.agents.size(); ++i) {
    const auto& a = sim.agents[i];
    const std::uint32_t w = layout.worker_of(a.id);
    if (w >= n_workers) fail(ErrorCode::InvalidArgument, "agent " + std::to_string(a.id) + " assigned to missing worker");
    slots[w][a.type].push_back(i);
  }

  MessageBoard board(model);
  std::vector<PostBuffer> posts;
  posts.reserve(n_workers);
  for (std::uint32_t w = 0; w < n_workers; ++w) posts.push_back(board.make_buffer());
  std::vector<DeliveryTally> tallies(n_workers);
  std::vector<std::int64_t> seq(sim.agents.size(), 0);

  IterationStats stats;
  stats.iteration = t;
  stats.posted_by_type.assign(model.message_types.size(), 0);

  for (std::size_t l = 0; l < schedule.size(); ++l) {
    auto run_worker = [&, l](std::uint32_t w) {
      for (const auto& bf : schedule[l]) {
        for (std::size_t slot : slots[w][bf.agent_type]) {
          auto& agent = sim.agents[slot];
          if (!agent.alive) continue;
          AgentContext ctx(model, board, agent, bf, t, sim.master_seed, posts[w], seq[slot], tallies[w], layout, w);
          auto where = [&] {
            return "agent " + std::to_string(agent.id) + " (" + model.agent_types[agent.type].name + "::" + bf.spec->name +
                   ") in layer " + std::to_string(l) + " of iteration " + std::to_string(t) + ": ";
          };
          Outcome outcome;
          try {
            outcome = (*bf.fn)(ctx);
          } catch (const Error& e) {
            throw Error(e.code(), where() + e.detail());
          } catch (const std::exception& e) {
            throw Error(ErrorCode::FunctionFailed, where() + e.what());
          }
          if (outcome == Outcome::Die) {
            if (!bf.spec->may_kill) fail(ErrorCode::FunctionFailed, where() + "function is not declared may_kill");
            agent.alive = false;
          }
        }
      }
    };

    if (n_workers == 1) {
      run_worker(0);
    } else {
      std::vector<std::future<void>> pending;
      for (std::uint32_t w = 1; w < n_workers; ++w) pending.push_back(std::async(std::launch::async, run_worker, w));
      std::exception_ptr first_error;
      try {
        run_worker(0);
      } catch (...) {
        first_error = std::current_exception();
      }
      for (auto& f : pending) {
        try {
          f.get();
        } catch (...) {
          if (!first_error) first_error = std::current_exception();
        }
      }
      if (first_error) std::rethrow_exception(first_error);
    }

    for (auto& p : posts)
      for (std::size_t m = 0; m < model.message_types.size(); ++m)
        stats.posted_by_type[m] += static_cast<std::int64_t>(p.by_type()[m].size());
    stats.layers.push_back(exchange_and_count(board, posts, tallies, t, l));
    if (observer) observer(t, l, board);
  }

  std::erase_if(sim.agents, [](const AgentInstance& a) { return !a.alive; });
  stats.alive_by_type.assign(n_types, 0);
  for (const auto& a : sim.agents) ++stats.alive_by_type[a.type];
  ++sim.iteration;
  return stats;
}

/// Owns a model's bound schedule and the evolving state.
class Simulation {
 public:
  Simulation(ModelDef model, BehaviorTable behaviors, SimulationState state, WorkerLayout layout = {})
      : model_(std::move(model)),
        behaviors_(std::move(behaviors)),
        schedule_(build_schedule(model_)),
        bound_(bind_schedule(model_, schedule_, behaviors_)),
        state_(std::move(state)),
        layout_(std::move(layout)) {}

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  IterationStats step(const BarrierObserver& observer = {}) {
    return run_iteration(state_, model_, bound_, layout_, observer);
  }

  const ModelDef& model() const { return model_; }
  const Schedule& schedule() const { return schedule_; }
  const SimulationState& state() const { return state_; }
  const WorkerLayout& layout() const { return layout_; }

 private:
  ModelDef model_;
  BehaviorTable behaviors_;  // bound_ points into this
  Schedule schedule_;
  BoundSchedule bound_;
  SimulationState state_;
  WorkerLayout layout_;
};

}  // namespace flame
