#include "mvn/semantics.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <thread>

namespace mvn {

std::string_view to_string(Semantics s) { return s == Semantics::kSync ? "sync" : "async"; }

Semantics parse_semantics(std::string_view text) {
  if (text == "sync" || text == "syn") return Semantics::kSync;
  if (text == "async" || text == "asy") return Semantics::kAsync;
  throw std::invalid_argument("unknown semantics '" + std::string(text) + "' (expected sync or async)");
}

std::string_view to_string(AttractorKind kind) {
  switch (kind) {
    case AttractorKind::kPoint: return "point";
    case AttractorKind::kCycle: return "cycle";
    case AttractorKind::kScc: return "scc";
  }
  return "?";
}

StateId sync_step(const Network& net, StateId state) {
  const auto& space = net.space();
  StateId next = state;
  for (std::size_t e = 0; e < net.entity_count(); ++e) {
    if (net.is_input(e)) continue;
    next = space.with_level(next, e, net.next_level(e, state));
  }
  return next;
}

GlobalState sync_step(const Network& net, const GlobalState& state) {
  return net.space().decode(sync_step(net, net.space().encode(state)));
}

std::vector<StateId> async_next(const Network& net, StateId state) {
  const auto& space = net.space();
  std::vector<StateId> out;
  for (std::size_t e = 0; e < net.entity_count(); ++e) {
    if (net.is_input(e)) continue;
    Level v = net.next_level(e, state);
    if (v != space.level(state, e)) out.push_back(space.with_level(state, e, v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<GlobalState> async_next(const Network& net, const GlobalState& state) {
  std::vector<GlobalState> out;
  for (auto id : async_next(net, net.space().encode(state))) out.push_back(net.space().decode(id));
  return out;
}

StateGraph::StateGraph(Semantics semantics, StateSpace space,
                       const std::vector<std::vector<StateId>>& successors)
    : semantics_(semantics), space_(std::move(space)) {
  if (successors.size() != space_.size()) throw std::invalid_argument("successor list size mismatch");
  offsets_.reserve(successors.size() + 1);
  offsets_.push_back(0);
  for (const auto& succ : successors) {
    targets_.insert(targets_.end(), succ.begin(), succ.end());
    offsets_.push_back(targets_.size());
  }
}

bool StateGraph::has_edge(StateId from, StateId to) const {
  auto succ = successors(from);
  return std::binary_search(succ.begin(), succ.end(), to);
}

StateGraph build_state_graph(const Network& net, Semantics semantics, unsigned workers) {
  const StateId n = net.space().size();
  std::vector<std::vector<StateId>> succ(n);
  auto fill = [&](StateId begin, StateId end) {
    for (StateId s = begin; s < end; ++s) {
      if (semantics == Semantics::kSync)
        succ[s] = {sync_step(net, s)};
      else
        succ[s] = async_next(net, s);
    }
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  constexpr StateId kParallelThreshold = 1u << 16;
  if (workers == 1 || n < kParallelThreshold) {
    fill(0, n);
  } else {
    // Each worker owns a disjoint slice of `succ`, so the merge is the
    // identity and the edge order matches the sequential build.
    std::vector<std::jthread> pool;
    const StateId chunk = (n + workers - 1) / workers;
    for (StateId begin = 0; begin < n; begin += chunk)
      pool.emplace_back(fill, begin, std::min<StateId>(n, begin + chunk));
  }
  return StateGraph(semantics, net.space(), succ);
}

std::vector<std::vector<StateId>> strongly_connected_components(const StateGraph& graph) {
  constexpr StateId kUnvisited = static_cast<StateId>(-1);
  const StateId n = graph.size();
  std::vector<StateId> index(n, kUnvisited), lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<StateId> stack;
  std::vector<std::vector<StateId>> components;
  StateId counter = 0;

  struct Frame {
    StateId vertex;
    std::size_t next_child;
  };
  std::vector<Frame> call_stack;

  for (StateId root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call_stack.push_back({root, 0});
    index[root] = lowlink[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!call_stack.empty()) {
      auto& frame = call_stack.back();
      const StateId v = frame.vertex;
      auto succ = graph.successors(v);
      if (frame.next_child < succ.size()) {
        StateId w = succ[frame.next_child++];
        if (index[w] == kUnvisited) {
          index[w] = lowlink[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call_stack.push_back({w, 0});
        } else if (on_stack[w]) {
          lowlink[v] = std::min(lowlink[v], index[w]);
        }
        continue;
      }
      if (lowlink[v] == index[v]) {
        std::vector<StateId> component;
        StateId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component.push_back(w);
        } while (w != v);
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
      }
      call_stack.pop_back();
      if (!call_stack.empty()) {
        StateId parent = call_stack.back().vertex;
        lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
      }
    }
  }
  return components;
}

AttractorSet attractors(const StateGraph& graph) {
  AttractorSet result;
  result.semantics = graph.semantics();
  const StateId n = graph.size();

  if (graph.semantics() == Semantics::kAsync) {
    for (StateId s = 0; s < n; ++s)
      if (graph.successors(s).empty()) result.attractors.push_back({AttractorKind::kPoint, {s}, true, 0});
  }

  std::vector<StateId> component_of(n);
  auto components = strongly_connected_components(graph);
  for (std::size_t c = 0; c < components.size(); ++c)
    for (auto s : components[c]) component_of[s] = static_cast<StateId>(c);

  for (std::size_t c = 0; c < components.size(); ++c) {
    const auto& comp = components[c];
    const bool self_loop = comp.size() == 1 && graph.has_edge(comp[0], comp[0]);
    if (comp.size() < 2 && !self_loop) continue;

    Attractor a;
    a.states = comp;
    for (auto s : comp)
      for (auto t : graph.successors(s))
        if (component_of[t] != c) ++a.exit_edges;
    a.terminal = a.exit_edges == 0;
    if (graph.semantics() == Semantics::kSync)
      a.kind = self_loop ? AttractorKind::kPoint : AttractorKind::kCycle;
    else
      a.kind = AttractorKind::kScc;
    result.attractors.push_back(std::move(a));
  }

  std::sort(result.attractors.begin(), result.attractors.end(),
            [](const Attractor& a, const Attractor& b) { return a.states.front() < b.states.front(); });
  return result;
}

std::optional<std::vector<StateId>> reachable(const StateGraph& graph, StateId from, StateId to) {
  if (from == to) return std::vector<StateId>{from};
  constexpr StateId kNone = static_cast<StateId>(-1);
  std::vector<StateId> parent(graph.size(), kNone);
  std::deque<StateId> queue{from};
  parent[from] = from;
  while (!queue.empty()) {
    StateId v = queue.front();
    queue.pop_front();
    for (auto w : graph.successors(v)) {
      if (parent[w] != kNone) continue;
      parent[w] = v;
      if (w == to) {
        std::vector<StateId> path{to};
        while (path.back() != from) path.push_back(parent[path.back()]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(w);
    }
  }
  return std::nullopt;
}

std::vector<bool> reachable_set(const StateGraph& graph, StateId from) {
  std::vector<bool> seen(graph.size(), false);
  std::vector<StateId> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    StateId v = stack.back();
    stack.pop_back();
    for (auto w : graph.successors(v))
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
  }
  return seen;
}

}  // namespace mvn
