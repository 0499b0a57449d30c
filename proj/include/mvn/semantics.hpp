#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mvn/model.hpp"

namespace mvn {

enum class Semantics { kSync, kAsync };

std::string_view to_string(Semantics s);
/// "sync"/"async" (also "syn"/"asy").  Throws std::invalid_argument.
Semantics parse_semantics(std::string_view text);

/// All entities update simultaneously.  Input entities keep their level.
StateId sync_step(const Network& net, StateId state);
GlobalState sync_step(const Network& net, const GlobalState& state);

/// Single-entity updates that change the state, ascending by id.
/// Input entities never contribute.
std::vector<StateId> async_next(const Network& net, StateId state);
std::vector<GlobalState> async_next(const Network& net, const GlobalState& state);

/// Explicit state graph over the full state space (CSR adjacency).
/// Successor lists are sorted ascending.
class StateGraph {
 public:
  StateGraph() = default;
  StateGraph(Semantics semantics, StateSpace space, const std::vector<std::vector<StateId>>& successors);

  Semantics semantics() const { return semantics_; }
  const StateSpace& space() const { return space_; }
  StateId size() const { return space_.size(); }
  std::size_t edge_count() const { return targets_.size(); }

  std::span<const StateId> successors(StateId s) const {
    return {targets_.data() + offsets_[s], targets_.data() + offsets_[s + 1]};
  }
  bool has_edge(StateId from, StateId to) const;

 private:
  Semantics semantics_ = Semantics::kAsync;
  StateSpace space_;
  std::vector<std::size_t> offsets_;
  std::vector<StateId> targets_;
};

/// Builds the graph; large state spaces are split across `workers` threads
/// (0 = hardware concurrency).  The result does not depend on `workers`.
StateGraph build_state_graph(const Network& net, Semantics semantics, unsigned workers = 0);

/// Tarjan's algorithm (iterative).  Components in reverse topological
/// order; each component sorted ascending.
std::vector<std::vector<StateId>> strongly_connected_components(const StateGraph& graph);

enum class AttractorKind { kPoint, kCycle, kScc };

std::string_view to_string(AttractorKind kind);

struct Attractor {
  AttractorKind kind = AttractorKind::kPoint;
  std::vector<StateId> states;   // ascending
  bool terminal = true;          // no edge leaves the state set
  std::size_t exit_edges = 0;
};

/// Async: point attractors (no successors) and every nontrivial SCC, the
/// latter flagged non-terminal if edges leave them.  Sync: the cycles of the
/// functional graph, a self-loop being a point attractor.
/// Sorted by smallest member.
struct AttractorSet {
  Semantics semantics = Semantics::kAsync;
  std::vector<Attractor> attractors;
};

AttractorSet attractors(const StateGraph& graph);

/// Shortest witness path from -> to (inclusive of both ends), or nullopt.
std::optional<std::vector<StateId>> reachable(const StateGraph& graph, StateId from, StateId to);

/// All states reachable from `from` (including itself), as a bitmap.
std::vector<bool> reachable_set(const StateGraph& graph, StateId from);

}  // namespace mvn
