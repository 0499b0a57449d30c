#pragma once

#include <compare>
#include <set>
#include <stdexcept>
#include <vector>

#include "mvn/semantics.hpp"

namespace mvn {

using Path = std::vector<StateId>;

/// A finite trace (empty loop) or an eventually periodic infinite trace
/// prefix . loop^omega.
struct LassoTrace {
  Path prefix;
  Path loop;

  bool finite() const { return loop.empty(); }
  friend auto operator<=>(const LassoTrace&, const LassoTrace&) = default;
};

using TraceSet = std::set<LassoTrace>;

class InfiniteTraceSet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unique representation of the denoted sequence: the loop is reduced to
/// its primitive period and the prefix is absorbed into the loop as far as
/// possible (so the prefix never ends with the loop's last element).
/// Finite traces are returned unchanged.
LassoTrace canonicalize(LassoTrace trace);

/// First `n` states of the denoted sequence (all of it, if finite and shorter).
Path unroll(const LassoTrace& trace, std::size_t n);

/// True if consecutive states (including loop wrap-around) are edges of
/// `graph` and a finite trace ends in a state without successors.
bool is_trace_of(const StateGraph& graph, const LassoTrace& trace);

/// One lasso per initial state.  Requires a sync graph.
TraceSet sync_traces(const StateGraph& sync_graph);
TraceSet sync_traces(const Network& net);

/// The async trace set is finite iff every state inside a nontrivial SCC
/// has exactly one successor.
bool trace_set_is_finite(const StateGraph& async_graph);

/// Every maximal walk from every state as canonical lassos.  Throws
/// InfiniteTraceSet if trace_set_is_finite() fails.
TraceSet async_traces(const StateGraph& async_graph);

}  // namespace mvn
