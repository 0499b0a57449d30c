#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "mvn/abstraction.hpp"

namespace mvn {

/// Sorted set of state ids.
using StateSet = std::vector<StateId>;

/// How a step term for an abstract point attractor S must be realised.
///
/// kStuckRun: some member of Gamma has a maximal concrete run that never
/// leaves the preimage of S (its E-class holds a concrete dead end or an
/// in-class cycle).  This makes validity monotone in Gamma and the verdict
/// equal to trace inclusion.
///
/// kClosedClass: every member's E-class has no exit at all.  This is the
/// stricter textbook condition; it can reject abstractions whose trace
/// inclusion holds.
enum class ValidityRule { kStuckRun, kClosedClass };

std::string_view to_string(ValidityRule rule);

enum class TermStatus { kValid, kMissingSuccessor, kPointAttractorEscapes };

std::string_view to_string(TermStatus status);

class GammaOutOfClass : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotClosed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckerLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// st(Gamma, S) together with its derived successor sets T(S_i), one per
/// abstract successor S_i (ascending).
struct StepTerm {
  StateId state = 0;
  StateSet gamma;
  std::vector<std::pair<StateId, StateSet>> successors;
  TermStatus status = TermStatus::kValid;

  bool valid() const { return status == TermStatus::kValid; }
};

struct CheckOptions {
  ValidityRule rule = ValidityRule::kStuckRun;
  /// Return as soon as some C(S) empties.  When false the pruning runs to
  /// its fixpoint and the surviving family is always reported.
  bool stop_on_empty = true;
  /// Shuffle the state and term sweep order of every pass.
  std::optional<std::uint64_t> shuffle_seed;
};

/// One step of the explanation of a failed check.  A term removed during
/// pruning names the successor term that was missing; the chain ends with
/// a term that was invalid from the start.
struct RemovalLink {
  StateId state = 0;
  StateSet gamma;
  TermStatus initial_status = TermStatus::kValid;
  std::optional<StateId> failed_successor;
  StateSet successor_gamma;
};

struct FailureWitness {
  StateId emptied_state = 0;
  bool empty_at_start = false;
  std::vector<RemovalLink> chain;
};

struct CheckStatistics {
  std::size_t abstract_entities = 0;
  std::size_t abstract_states = 0;
  std::size_t concrete_states = 0;
  std::size_t max_class_size = 0;
  std::size_t subsets_tried = 0;
  std::size_t initial_terms = 0;
  std::size_t removed_terms = 0;
  std::size_t iterations = 0;
};

struct CheckResult {
  bool holds = false;
  ValidityRule rule = ValidityRule::kStuckRun;
  /// Surviving Gamma sets per abstract state, ascending.  Filled when the
  /// check holds or when run with stop_on_empty = false.
  std::map<StateId, std::vector<StateSet>> surviving;
  std::optional<FailureWitness> witness;
  CheckStatistics stats;
};

/// Step-term machinery for one (abstract, concrete, phi) triple.  All
/// per-class data is computed up front; every method is const.
class AbstractionChecker {
 public:
  static constexpr std::size_t kDefaultClassLimit = 20;

  /// Throws StructureMismatch, MappingMismatch, MappingError, or
  /// CheckerLimit when some |A(S)| exceeds class_limit.
  AbstractionChecker(Network abstract_net, Network concrete_net, AbstractionMapping phi,
                     std::size_t class_limit = kDefaultClassLimit);

  const Network& abstract_network() const { return abstract_; }
  const Network& concrete_network() const { return concrete_; }
  const AbstractionMapping& mapping() const { return phi_; }
  const StateGraph& abstract_graph() const { return abstract_graph_; }
  const StateGraph& concrete_graph() const { return concrete_graph_; }

  /// A(S): concrete states whose image is S.
  const StateSet& concrete_class(StateId abstract_state) const { return classes_[abstract_state].members; }

  /// E[S']: states reachable from S' through concrete steps that keep the
  /// abstract image unchanged, S' included.
  StateSet consec_closure(StateId concrete_state) const;

  /// Throws GammaOutOfClass if gamma is empty or not inside A(S).
  StepTerm make_step_term(StateId abstract_state, const StateSet& gamma,
                          ValidityRule rule = ValidityRule::kStuckRun) const;

  /// Valid terms over every nonempty Gamma within A(S), ascending by Gamma
  /// bitmask over A(S).
  std::vector<StepTerm> all_step_terms(StateId abstract_state, ValidityRule rule = ValidityRule::kStuckRun) const;

  /// The iterative pruning of step-term families.
  CheckResult run(const CheckOptions& options = {}) const;

  /// Concrete path whose merged image is `abstract_path`, built by backward
  /// chaining through the surviving family.  Throws NotClosed if `result`
  /// does not hold a closed, everywhere-nonempty family, and
  /// std::invalid_argument if `abstract_path` is not a path of the
  /// abstract async graph.
  Path witness_path(const CheckResult& result, const Path& abstract_path) const;

 private:
  using Mask = std::uint32_t;

  struct ClassData {
    StateSet members;
    std::vector<StateId> abstract_successors;
    std::vector<Mask> successor_masks;  // [member * |successors| + i]
    Mask closed_mask = 0;               // members whose E-class has no exit
    Mask stuck_mask = 0;                // members with a run that never leaves the class
  };

  Mask gamma_mask(StateId abstract_state, const StateSet& gamma) const;
  StateSet members_of(StateId abstract_state, Mask mask) const;
  void successor_sets(const ClassData& cls, Mask gamma, std::vector<Mask>& out) const;
  TermStatus status_of(const ClassData& cls, Mask gamma, const std::vector<Mask>& succ, ValidityRule rule) const;
  StepTerm term_from_mask(StateId abstract_state, Mask gamma, ValidityRule rule) const;

  Network abstract_;
  Network concrete_;
  AbstractionMapping phi_;
  StateGraph abstract_graph_;
  StateGraph concrete_graph_;
  std::vector<ClassData> classes_;
  std::vector<std::uint32_t> position_;  // index of a concrete state inside its class
};

CheckResult check_asyn_abs(const Network& abstract_net, const Network& concrete_net, const AbstractionMapping& phi,
                           const CheckOptions& options = {});

}  // namespace mvn
