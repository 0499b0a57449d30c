#include "mvn/oracle.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "mvn/model_io.hpp"

namespace mvn {

bool oracle_check(const Network& abstract_net, const Network& concrete_net, const AbstractionMapping& phi) {
  require_compatible(abstract_net, concrete_net, phi);
  const StateGraph g1 = build_state_graph(abstract_net, Semantics::kAsync);
  const StateGraph g2 = build_state_graph(concrete_net, Semantics::kAsync);
  if (!trace_set_is_finite(g1)) throw Unsupported("abstract network has infinitely many async traces");
  if (!trace_set_is_finite(g2)) throw Unsupported("concrete network has infinitely many async traces");
  const TraceSet abstract_traces = async_traces(g1);
  const TraceSet image = abstract_trace_set(phi, async_traces(g2));
  return std::includes(image.begin(), image.end(), abstract_traces.begin(), abstract_traces.end());
}

namespace {

/// Concrete side of the subset constructions.
class Preimages {
 public:
  Preimages(const StateGraph& concrete, const AbstractionMapping& phi, StateId abstract_size)
      : g_(concrete), phi_(phi), members_(abstract_size) {
    for (StateId c = 0; c < g_.size(); ++c) members_[phi.apply(c)].push_back(c);
  }

  const StateSet& of(StateId abstract_state) const { return members_[abstract_state]; }

  /// Everything reachable from `entry` without changing the image.
  StateSet closure(const StateSet& entry) const {
    std::vector<bool> seen(g_.size(), false);
    StateSet stack = entry;
    StateSet out;
    for (auto s : entry) seen[s] = true;
    while (!stack.empty()) {
      StateId s = stack.back();
      stack.pop_back();
      out.push_back(s);
      for (auto t : g_.successors(s))
        if (!seen[t] && phi_.apply(t) == phi_.apply(s)) {
          seen[t] = true;
          stack.push_back(t);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Successors of `from` whose image is `target`.
  StateSet step(const StateSet& from, StateId target) const {
    std::set<StateId> out;
    for (auto c : from)
      for (auto t : g_.successors(c))
        if (phi_.apply(t) == target) out.insert(t);
    return {out.begin(), out.end()};
  }

  /// `closed` (a closure) holds a concrete dead end or an image-preserving
  /// cycle.
  bool has_stuck_run(const StateSet& closed) const {
    std::map<StateId, std::size_t> out_degree;
    std::map<StateId, std::vector<StateId>> preds;
    for (auto c : closed) {
      if (g_.successors(c).empty()) return true;
      std::size_t& deg = out_degree[c];
      for (auto t : g_.successors(c))
        if (phi_.apply(t) == phi_.apply(c)) {
          ++deg;
          preds[t].push_back(c);
        }
    }
    StateSet sinks;
    for (auto& [c, deg] : out_degree)
      if (deg == 0) sinks.push_back(c);
    std::size_t removed = 0;
    while (!sinks.empty()) {
      StateId c = sinks.back();
      sinks.pop_back();
      ++removed;
      for (auto p : preds[c])
        if (--out_degree[p] == 0) sinks.push_back(p);
    }
    return removed < closed.size();
  }

 private:
  const StateGraph& g_;
  const AbstractionMapping& phi_;
  std::vector<StateSet> members_;
};

}  // namespace

bool subset_inclusion_check(const Network& abstract_net, const Network& concrete_net, const AbstractionMapping& phi) {
  require_compatible(abstract_net, concrete_net, phi);
  const StateGraph g1 = build_state_graph(abstract_net, Semantics::kAsync);
  const StateGraph g2 = build_state_graph(concrete_net, Semantics::kAsync);
  const Preimages pre(g2, phi, g1.size());

  std::set<std::pair<StateId, StateSet>> seen;
  std::vector<std::pair<StateId, StateSet>> work;
  for (StateId s = 0; s < g1.size(); ++s)
    if (seen.emplace(s, pre.of(s)).second) work.emplace_back(s, pre.of(s));
  while (!work.empty()) {
    auto [s, entry] = std::move(work.back());
    work.pop_back();
    const StateSet reach = pre.closure(entry);
    const auto next = g1.successors(s);
    if (next.empty() && !pre.has_stuck_run(reach)) return false;
    for (auto t : next) {
      StateSet target = pre.step(reach, t);
      if (target.empty()) return false;
      if (seen.emplace(t, target).second) work.emplace_back(t, std::move(target));
    }
  }
  return true;
}

std::optional<Path> bounded_prefix_counterexample(const Network& abstract_net, const Network& concrete_net,
                                                  const AbstractionMapping& phi, std::size_t depth) {
  require_compatible(abstract_net, concrete_net, phi);
  const StateGraph g1 = build_state_graph(abstract_net, Semantics::kAsync);
  const StateGraph g2 = build_state_graph(concrete_net, Semantics::kAsync);
  const Preimages pre(g2, phi, g1.size());

  Path walk;
  std::optional<Path> found;
  std::function<void(StateId, const StateSet&)> extend = [&](StateId s, const StateSet& entry) {
    if (found || walk.size() >= depth) return;
    const StateSet reach = pre.closure(entry);
    for (auto next : g1.successors(s)) {
      const StateSet target = pre.step(reach, next);
      walk.push_back(next);
      if (target.empty()) {
        found = walk;
        return;
      }
      extend(next, target);
      walk.pop_back();
      if (found) return;
    }
  };

  for (StateId s = 0; s < g1.size() && !found; ++s) {
    walk = {s};
    extend(s, pre.of(s));
  }
  return found;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  bool chance(unsigned percent) { return below(100) < percent; }

 private:
  std::mt19937_64 engine_;
};

NextStateTable random_table(Draw& draw, const std::vector<Entity>& entities, const Neighbourhood& nbh, Level max) {
  NextStateTable table;
  if (nbh.is_input_entity()) {
    table.rows[{}] = 0;
    return table;
  }
  std::vector<Level> ranges;
  for (auto i : nbh.inputs) ranges.push_back(entities[i].max_level);
  for (auto& tuple : input_tuples(ranges)) table.rows[tuple] = static_cast<Level>(draw.below(max + 1u));
  return table;
}

/// Random pick from the choice set of every abstract row.
Mvn random_candidate(Draw& draw, const Mvn& concrete, const AbstractionMapping& phi) {
  Mvn out;
  out.name = concrete.name + "_abs";
  out.entities = phi.abstract_space().entities();
  out.neighbourhoods = concrete.neighbourhoods;
  out.tables.resize(concrete.entities.size());
  for (std::size_t e = 0; e < concrete.entities.size(); ++e) {
    if (concrete.neighbourhoods[e].is_input_entity()) {
      out.tables[e].rows[{}] = 0;
      continue;
    }
    const auto& inputs = concrete.neighbourhoods[e].inputs;
    std::map<std::vector<Level>, std::set<Level>> choices;
    for (const auto& [tuple, level] : concrete.tables[e].rows) {
      std::vector<Level> image;
      for (std::size_t c = 0; c < inputs.size(); ++c) image.push_back(phi.map_level(inputs[c], tuple[c]));
      choices[image].insert(phi.map_level(e, level));
    }
    for (const auto& [row, set] : choices) {
      auto it = set.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(draw.below(set.size())));
      out.tables[e].rows[row] = *it;
    }
  }
  return out;
}

}  // namespace

RandomInstance random_instance(std::uint64_t seed) {
  Draw draw(seed);
  for (;;) {
    const std::size_t k = 2 + draw.below(2);
    Mvn concrete;
    concrete.name = "R" + std::to_string(seed % 100000);
    for (std::size_t i = 0; i < k; ++i)
      concrete.entities.push_back({std::string(1, static_cast<char>('A' + i)), static_cast<Level>(1 + draw.below(2))});
    concrete.entities[draw.below(k)].max_level = 2;

    std::size_t inputs = 0;
    concrete.neighbourhoods.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      if (inputs + 1 < k && draw.chance(10)) {
        ++inputs;
        continue;
      }
      auto& nbh = concrete.neighbourhoods[i].inputs;
      for (std::size_t j = 0; j < k; ++j)
        if (draw.chance(50)) nbh.push_back(j);
      if (nbh.empty()) nbh.push_back(draw.below(k));
    }
    for (std::size_t i = 0; i < k; ++i)
      concrete.tables.push_back(
          random_table(draw, concrete.entities, concrete.neighbourhoods[i], concrete.entities[i].max_level));

    const Network net(concrete);
    if (build_state_graph(net, Semantics::kAsync, 1).edge_count() == 0) continue;

    static constexpr Level kSurjections[6][3] = {{0, 0, 1}, {1, 1, 0}, {0, 1, 1}, {1, 0, 0}, {0, 1, 0}, {1, 0, 1}};
    std::vector<std::optional<StateMapping>> slots(k);
    std::vector<std::size_t> wide;
    for (std::size_t i = 0; i < k; ++i) {
      if (concrete.entities[i].max_level != 2) continue;
      wide.push_back(i);
      if (draw.chance(70)) {
        const auto& s = kSurjections[draw.below(6)];
        slots[i] = StateMapping{{s[0], s[1], s[2]}};
      }
    }
    if (std::none_of(slots.begin(), slots.end(), [](const auto& s) { return s.has_value(); })) {
      const auto& s = kSurjections[draw.below(6)];
      slots[wide[draw.below(wide.size())]] = StateMapping{{s[0], s[1], s[2]}};
    }
    AbstractionMapping phi(net.space(), std::move(slots));

    Mvn abstract;
    bool candidate = !draw.chance(15);
    if (candidate) {
      abstract = random_candidate(draw, concrete, phi);
    } else {
      abstract.name = concrete.name + "_rnd";
      abstract.entities = phi.abstract_space().entities();
      abstract.neighbourhoods = concrete.neighbourhoods;
      for (std::size_t i = 0; i < k; ++i)
        abstract.tables.push_back(
            random_table(draw, abstract.entities, abstract.neighbourhoods[i], abstract.entities[i].max_level));
    }
    return RandomInstance{std::move(abstract), std::move(concrete), std::move(phi), candidate};
  }
}

DifferentialReport differential_suite(std::uint64_t seed, std::size_t count, ValidityRule rule) {
  DifferentialReport report;
  report.seed = seed;
  report.count = count;
  report.rule = rule;
  for (std::size_t index = 0; index < count; ++index) {
    const std::uint64_t instance_seed = splitmix64(seed ^ splitmix64(index));
    RandomInstance inst = random_instance(instance_seed);
    const Network abstract_net(inst.abstract_model);
    const Network concrete_net(inst.concrete_model);
    CheckOptions options;
    options.rule = rule;
    const bool verdict = check_asyn_abs(abstract_net, concrete_net, inst.phi, options).holds;

    const bool subset = subset_inclusion_check(abstract_net, concrete_net, inst.phi);

    auto diverge = [&](bool oracle, bool finite) {
      report.divergences.push_back({index, instance_seed, verdict, oracle, subset, finite,
                                    serialize_model(inst.abstract_model), serialize_model(inst.concrete_model),
                                    serialize_mapping(inst.phi)});
    };
    try {
      const bool expected = oracle_check(abstract_net, concrete_net, inst.phi);
      ++report.supported;
      if (verdict) ++report.holds;
      if (verdict != expected || subset != expected) diverge(expected, true);
    } catch (const Unsupported&) {
      ++report.unsupported;
      if (verdict) ++report.unsupported_holds;
      const bool prefix_ok = !bounded_prefix_counterexample(abstract_net, concrete_net, inst.phi);
      report.unsupported_instances.push_back({index, instance_seed, verdict, subset, prefix_ok});
      if (verdict != subset || (subset && !prefix_ok)) diverge(subset, false);
    }
  }
  return report;
}

namespace {

bool merged_image_equals(const AbstractionMapping& phi, const Path& concrete, const Path& abstract) {
  Path image;
  for (auto c : concrete) {
    const StateId a = phi.apply(c);
    if (image.empty() || image.back() != a) image.push_back(a);
  }
  return image == abstract;
}

}  // namespace

SoundnessReport reachability_soundness_suite(const Network& abstract_net, const Network& concrete_net,
                                             const AbstractionMapping& phi) {
  const AbstractionChecker checker(abstract_net, concrete_net, phi);
  const CheckResult result = checker.run();
  if (!result.holds) throw std::invalid_argument("reachability soundness needs a holding abstraction");

  const StateGraph& g1 = checker.abstract_graph();
  const StateGraph& g2 = checker.concrete_graph();
  std::vector<StateSet> preimage(g1.size());
  for (StateId c = 0; c < g2.size(); ++c) preimage[phi.apply(c)].push_back(c);
  std::vector<std::vector<bool>> concrete_reach(g2.size());
  for (StateId c = 0; c < g2.size(); ++c) concrete_reach[c] = reachable_set(g2, c);

  SoundnessReport report;
  const auto& space = g1.space();
  for (StateId s1 = 0; s1 < g1.size(); ++s1) {
    const auto reach1 = reachable_set(g1, s1);
    for (StateId s2 = 0; s2 < g1.size(); ++s2) {
      if (!reach1[s2]) continue;
      ++report.pairs_checked;
      bool realised = false;
      for (auto c1 : preimage[s1])
        for (auto c2 : preimage[s2])
          if (concrete_reach[c1][c2]) realised = true;
      if (!realised)
        report.counterexamples.push_back(
            {s1, s2, "no concrete state over " + space.label(s1) + " reaches one over " + space.label(s2)});

      const auto path = reachable(g1, s1, s2);
      const Path alpha = checker.witness_path(result, *path);
      bool ok = !alpha.empty() && merged_image_equals(phi, alpha, *path);
      for (std::size_t i = 0; ok && i + 1 < alpha.size(); ++i) ok = g2.has_edge(alpha[i], alpha[i + 1]);
      ++report.witness_paths_checked;
      if (!ok)
        report.counterexamples.push_back(
            {s1, s2, "witness path for " + space.label(s1) + " -> " + space.label(s2) + " is not a concrete path"});
    }
  }
  return report;
}

bool AttractorCorrespondence::ok() const {
  return std::all_of(matches.begin(), matches.end(), [](const auto& m) { return !m.concrete_attractors.empty(); });
}

AttractorCorrespondence attractor_correspondence(const Network& abstract_net, const Network& concrete_net,
                                                 const AbstractionMapping& phi) {
  require_compatible(abstract_net, concrete_net, phi);
  const StateGraph g1 = build_state_graph(abstract_net, Semantics::kAsync);
  const StateGraph g2 = build_state_graph(concrete_net, Semantics::kAsync);
  const AttractorSet a1 = attractors(g1);
  const AttractorSet a2 = attractors(g2);

  std::vector<std::optional<std::size_t>> owner(g2.size());
  for (std::size_t i = 0; i < a2.attractors.size(); ++i)
    for (auto s : a2.attractors[i].states) owner[s] = i;

  AttractorCorrespondence out;
  for (const auto& attractor : a1.attractors) {
    std::vector<bool> inside(g2.size(), false);
    for (StateId c = 0; c < g2.size(); ++c)
      inside[c] = std::binary_search(attractor.states.begin(), attractor.states.end(), phi.apply(c));

    std::set<std::size_t> hits;
    std::vector<std::vector<StateId>> restricted(g2.size());
    for (StateId c = 0; c < g2.size(); ++c) {
      if (!inside[c]) continue;
      const auto succ = g2.successors(c);
      if (succ.empty() && owner[c]) hits.insert(*owner[c]);
      for (auto t : succ)
        if (inside[t]) restricted[c].push_back(t);
    }
    const StateGraph sub(Semantics::kAsync, g2.space(), restricted);
    for (const auto& component : strongly_connected_components(sub)) {
      if (component.size() < 2) continue;
      // An in-preimage cycle lies inside one nontrivial concrete SCC.
      if (owner[component.front()]) hits.insert(*owner[component.front()]);
    }
    out.matches.push_back({attractor.states, {hits.begin(), hits.end()}});
  }
  return out;
}

}  // namespace mvn
