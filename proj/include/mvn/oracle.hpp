#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvn/checker.hpp"

namespace mvn {

/// The oracle cannot decide an instance with an infinite trace set.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Direct trace inclusion: T_Asy(abstract) within phi(T_Asy(concrete)),
/// compared as canonical lasso sets.  Throws Unsupported if either trace
/// set is infinite.
bool oracle_check(const Network& abstract_net, const Network& concrete_net, const AbstractionMapping& phi);

/// Trace inclusion decided by a forward subset construction over pairs
/// (abstract state, concrete entry set).  Exact on infinite trace sets as
/// well: an infinite abstract walk is realised as soon as each of its
/// prefixes is (finitely branching), and a walk ending in an abstract dead
/// end needs a concrete run that never leaves the last preimage.
bool subset_inclusion_check(const Network& abstract_net, const Network& concrete_net, const AbstractionMapping& phi);

/// Necessary condition usable on infinite trace sets: every abstract walk
/// of at most `depth` states is the merged image of some concrete walk.
/// Returns the first abstract walk with no concrete counterpart, if any.
std::optional<Path> bounded_prefix_counterexample(const Network& abstract_net, const Network& concrete_net,
                                                  const AbstractionMapping& phi, std::size_t depth = 8);

/// One randomly generated (abstract, concrete, phi) triple.
struct RandomInstance {
  Mvn abstract_model;
  Mvn concrete_model;
  AbstractionMapping phi;
  bool abstract_is_candidate = true;
};

/// Concrete models have 2..3 entities with at most 3 levels, at least one
/// asynchronous edge and at least one non-Boolean entity.  Deterministic
/// for a given engine state.
RandomInstance random_instance(std::uint64_t seed);

struct DivergenceRecord {
  std::size_t index = 0;
  std::uint64_t instance_seed = 0;
  bool checker = false;
  bool oracle = false;         // trace-set oracle where supported, else the subset oracle
  bool subset_oracle = false;
  bool finite = true;          // decided by oracle_check
  std::string abstract_source;
  std::string concrete_source;
  std::string mapping_source;
};

struct UnsupportedRecord {
  std::size_t index = 0;
  std::uint64_t instance_seed = 0;
  bool checker = false;
  bool subset_oracle = false;
  bool prefix_check_passed = true;
};

struct DifferentialReport {
  std::uint64_t seed = 0;
  std::size_t count = 0;
  ValidityRule rule = ValidityRule::kStuckRun;
  std::size_t supported = 0;
  std::size_t holds = 0;  // supported instances whose verdict is "holds"
  std::size_t unsupported = 0;
  std::size_t unsupported_holds = 0;
  std::vector<DivergenceRecord> divergences;
  std::vector<UnsupportedRecord> unsupported_instances;

  bool ok() const { return divergences.empty(); }
};

/// Runs `count` random instances through the checker and both oracles.  A
/// divergence is any disagreement among the three verdicts, or a "holds"
/// verdict refuted by the bounded prefix check.
DifferentialReport differential_suite(std::uint64_t seed, std::size_t count,
                                      ValidityRule rule = ValidityRule::kStuckRun);

struct ReachabilityCounterexample {
  StateId from = 0;
  StateId to = 0;
  std::string reason;
};

struct SoundnessReport {
  std::size_t pairs_checked = 0;
  std::size_t witness_paths_checked = 0;
  std::vector<ReachabilityCounterexample> counterexamples;

  bool ok() const { return counterexamples.empty(); }
};

/// For every reachable abstract pair (S1, S2): some concrete S1' in A(S1)
/// reaches some S2' in A(S2) (exhaustive search), and the checker's
/// witness_path for the abstract path is a concrete path with the right
/// merged image.  Requires the check to hold.
SoundnessReport reachability_soundness_suite(const Network& abstract_net, const Network& concrete_net,
                                             const AbstractionMapping& phi);

struct AttractorMatch {
  std::vector<StateId> abstract_states;
  /// Indices into attractors(concrete async graph) that trap a concrete
  /// run inside the preimage of the abstract attractor.
  std::vector<std::size_t> concrete_attractors;
};

struct AttractorCorrespondence {
  std::vector<AttractorMatch> matches;
  bool ok() const;
};

/// For every abstract async attractor, the concrete attractors holding a
/// point attractor or a cycle that stays inside its preimage.
AttractorCorrespondence attractor_correspondence(const Network& abstract_net, const Network& concrete_net,
                                                 const AbstractionMapping& phi);

}  // namespace mvn
