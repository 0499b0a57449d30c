#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvn/traces.hpp"

namespace mvn {

class MappingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The two networks do not share entities and neighbourhoods.
class StructureMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The mapping's codomain does not match the abstract network's ranges.
class MappingMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Surjective level compression {0..m} -> {0..n} with 0 < n < m.
struct StateMapping {
  std::vector<Level> image;  // image[level]

  Level codomain_max() const;
  bool order_preserving() const;

  friend bool operator==(const StateMapping&, const StateMapping&) = default;
};

/// One slot per entity of the concrete space: a state mapping or the
/// identity (nullopt).
class AbstractionMapping {
 public:
  /// Throws MappingError if a slot is not a proper state mapping for its
  /// entity (wrong domain, not surjective, codomain of size 1 or not smaller).
  AbstractionMapping(StateSpace concrete, std::vector<std::optional<StateMapping>> slots);

  static AbstractionMapping identity(StateSpace concrete);

  const StateSpace& concrete_space() const { return concrete_; }
  const StateSpace& abstract_space() const { return abstract_; }
  const std::optional<StateMapping>& slot(std::size_t entity) const { return slots_[entity]; }

  /// At least one slot is a proper state mapping.
  bool is_proper() const;
  /// Human-readable notes for non-order-preserving slots.
  std::vector<std::string> warnings() const;

  Level map_level(std::size_t entity, Level level) const {
    return slots_[entity] ? slots_[entity]->image[level] : level;
  }
  StateId apply(StateId concrete) const { return image_[concrete]; }
  GlobalState apply(const GlobalState& concrete) const;

 private:
  StateSpace concrete_;
  StateSpace abstract_;
  std::vector<std::optional<StateMapping>> slots_;
  std::vector<StateId> image_;
};

GlobalState abstract_state(const AbstractionMapping& phi, const GlobalState& s);

/// Pointwise image of the denoted sequence with consecutive duplicates
/// merged.  A loop whose image is a single state yields a finite trace.
LassoTrace abstract_trace(const AbstractionMapping& phi, const LassoTrace& trace);

TraceSet abstract_trace_set(const AbstractionMapping& phi, const TraceSet& traces);

/// Preconditions shared by the abstraction checks: same structure, the
/// abstract network's ranges equal the mapping's codomain, and phi is proper.
void require_compatible(const Network& abstract_net, const Network& concrete_net, const AbstractionMapping& phi);

/// Finite trace inclusion for the synchronous semantics, both sides
/// normalised by merging consecutive duplicates.
bool check_sync_abstraction(const Network& abstract_net, const Network& concrete_net, const AbstractionMapping& phi);

/// The choice set D(u) of one abstract table row.
struct ChoiceRow {
  std::size_t entity = 0;
  std::vector<Level> inputs;
  std::vector<Level> choices;  // ascending
};

struct CandidateSet {
  std::vector<ChoiceRow> rows;  // every abstract row of every non-input entity
  std::vector<Mvn> candidates;

  /// Rows with more than one choice, in candidate-index digit order.
  std::vector<ChoiceRow> ambiguous_rows() const;
};

/// Candidate abstract models: every way of picking one element of D(u) per
/// abstract row.  Candidate 0 picks the smallest choice everywhere; the last
/// ambiguous row varies fastest.  Throws MappingError above `limit`.
CandidateSet enumerate_candidates(const Network& concrete, const AbstractionMapping& phi,
                                  std::size_t limit = 1u << 16);

}  // namespace mvn
