#include "mvn/traces.hpp"

#include <algorithm>

namespace mvn {

namespace {

// Shortest p such that loop is loop[0..p) repeated.
std::size_t primitive_period(const Path& loop) {
  const std::size_t n = loop.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = loop[i] == loop[i - p];
    if (ok) return p;
  }
  return n;
}

}  // namespace

LassoTrace canonicalize(LassoTrace trace) {
  if (trace.finite()) return trace;
  trace.loop.resize(primitive_period(trace.loop));
  while (!trace.prefix.empty() && trace.prefix.back() == trace.loop.back()) {
    std::rotate(trace.loop.rbegin(), trace.loop.rbegin() + 1, trace.loop.rend());
    trace.prefix.pop_back();
  }
  return trace;
}

Path unroll(const LassoTrace& trace, std::size_t n) {
  Path out;
  out.reserve(n);
  for (std::size_t i = 0; i < n && i < trace.prefix.size(); ++i) out.push_back(trace.prefix[i]);
  if (trace.finite()) return out;
  for (std::size_t i = 0; out.size() < n; ++i) out.push_back(trace.loop[i % trace.loop.size()]);
  return out;
}

bool is_trace_of(const StateGraph& graph, const LassoTrace& trace) {
  Path seq = trace.prefix;
  seq.insert(seq.end(), trace.loop.begin(), trace.loop.end());
  if (seq.empty()) return false;
  for (auto s : seq)
    if (s >= graph.size()) return false;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i)
    if (!graph.has_edge(seq[i], seq[i + 1])) return false;
  if (trace.finite()) return graph.successors(seq.back()).empty();
  return graph.has_edge(trace.loop.back(), trace.loop.front());
}

TraceSet sync_traces(const StateGraph& sync_graph) {
  if (sync_graph.semantics() != Semantics::kSync)
    throw std::invalid_argument("sync_traces needs a synchronous state graph");
  TraceSet out;
  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> position(sync_graph.size(), kUnseen);
  for (StateId start = 0; start < sync_graph.size(); ++start) {
    Path walk;
    StateId s = start;
    while (position[s] == kUnseen) {
      position[s] = walk.size();
      walk.push_back(s);
      s = sync_graph.successors(s).front();
    }
    const std::size_t cut = position[s];
    LassoTrace t{Path(walk.begin(), walk.begin() + static_cast<std::ptrdiff_t>(cut)),
                 Path(walk.begin() + static_cast<std::ptrdiff_t>(cut), walk.end())};
    for (auto v : walk) position[v] = kUnseen;
    out.insert(canonicalize(std::move(t)));
  }
  return out;
}

TraceSet sync_traces(const Network& net) { return sync_traces(build_state_graph(net, Semantics::kSync)); }

bool trace_set_is_finite(const StateGraph& async_graph) {
  for (const auto& comp : strongly_connected_components(async_graph)) {
    if (comp.size() < 2) continue;
    for (auto s : comp)
      if (async_graph.successors(s).size() != 1) return false;
  }
  return true;
}

TraceSet async_traces(const StateGraph& async_graph) {
  if (async_graph.semantics() != Semantics::kAsync)
    throw std::invalid_argument("async_traces needs an asynchronous state graph");
  if (!trace_set_is_finite(async_graph))
    throw InfiniteTraceSet("asynchronous trace set is infinite: a cycle state has more than one successor");

  TraceSet out;
  std::vector<bool> on_path(async_graph.size(), false);
  Path path;

  // Depth-first over maximal walks; a walk closes into a lasso on the first
  // revisit of a state on the current path.
  struct Frame {
    StateId state;
    std::size_t next_child;
  };
  std::vector<Frame> stack;
  for (StateId start = 0; start < async_graph.size(); ++start) {
    stack.push_back({start, 0});
    path.push_back(start);
    on_path[start] = true;
    while (!stack.empty()) {
      auto& frame = stack.back();
      auto succ = async_graph.successors(frame.state);
      if (succ.empty() && frame.next_child == 0) {
        out.insert(LassoTrace{path, {}});
        frame.next_child = 1;
      }
      if (frame.next_child < succ.size()) {
        StateId next = succ[frame.next_child++];
        if (on_path[next]) {
          auto at = std::find(path.begin(), path.end(), next);
          out.insert(canonicalize(LassoTrace{Path(path.begin(), at), Path(at, path.end())}));
        } else {
          stack.push_back({next, 0});
          path.push_back(next);
          on_path[next] = true;
        }
        continue;
      }
      on_path[frame.state] = false;
      path.pop_back();
      stack.pop_back();
    }
  }
  return out;
}

}  // namespace mvn
