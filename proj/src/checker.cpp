#include "mvn/checker.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <numeric>
#include <random>

namespace mvn {

std::string_view to_string(ValidityRule rule) {
  return rule == ValidityRule::kStuckRun ? "stuck-run" : "closed-class";
}

std::string_view to_string(TermStatus status) {
  switch (status) {
    case TermStatus::kValid: return "valid";
    case TermStatus::kMissingSuccessor: return "missing-successor";
    case TermStatus::kPointAttractorEscapes: return "point-attractor-escapes";
  }
  return "?";
}

AbstractionChecker::AbstractionChecker(Network abstract_net, Network concrete_net, AbstractionMapping phi,
                                       std::size_t class_limit)
    : abstract_(std::move(abstract_net)), concrete_(std::move(concrete_net)), phi_(std::move(phi)) {
  require_compatible(abstract_, concrete_, phi_);
  if (class_limit > 30) throw CheckerLimit("class limit above 30 is not supported");
  abstract_graph_ = build_state_graph(abstract_, Semantics::kAsync);
  concrete_graph_ = build_state_graph(concrete_, Semantics::kAsync);

  const StateId n1 = abstract_graph_.size();
  const StateId n2 = concrete_graph_.size();
  classes_.resize(n1);
  position_.resize(n2);
  for (StateId c = 0; c < n2; ++c) {
    auto& cls = classes_[phi_.apply(c)];
    position_[c] = static_cast<std::uint32_t>(cls.members.size());
    cls.members.push_back(c);
  }
  for (StateId s = 0; s < n1; ++s)
    if (classes_[s].members.size() > class_limit)
      throw CheckerLimit("abstract state " + abstract_.space().label(s) + " represents " +
                         std::to_string(classes_[s].members.size()) + " concrete states (limit " +
                         std::to_string(class_limit) + ")");

  for (StateId s = 0; s < n1; ++s) {
    auto& cls = classes_[s];
    auto succ = abstract_graph_.successors(s);
    cls.abstract_successors.assign(succ.begin(), succ.end());
    const std::size_t k = cls.members.size();
    const std::size_t m = cls.abstract_successors.size();
    cls.successor_masks.assign(k * m, 0);

    // Peel members whose in-class successors are all peeled; what remains
    // can reach a cycle without leaving the class.
    std::vector<std::vector<std::uint32_t>> in_class_preds(k);
    std::vector<std::size_t> out_degree(k, 0);
    for (std::size_t j = 0; j < k; ++j)
      for (auto t : concrete_graph_.successors(cls.members[j]))
        if (phi_.apply(t) == s) {
          ++out_degree[j];
          in_class_preds[position_[t]].push_back(static_cast<std::uint32_t>(j));
        }
    std::vector<bool> peeled(k, false);
    std::vector<std::uint32_t> queue;
    for (std::size_t j = 0; j < k; ++j)
      if (out_degree[j] == 0) queue.push_back(static_cast<std::uint32_t>(j));
    while (!queue.empty()) {
      auto j = queue.back();
      queue.pop_back();
      peeled[j] = true;
      for (auto p : in_class_preds[j])
        if (--out_degree[p] == 0) queue.push_back(p);
    }

    for (std::size_t j = 0; j < k; ++j) {
      bool closed = true;
      bool stuck = !peeled[j];
      for (auto e : consec_closure(cls.members[j])) {
        auto esucc = concrete_graph_.successors(e);
        if (esucc.empty()) stuck = true;
        for (auto t : esucc) {
          const StateId a = phi_.apply(t);
          if (a == s) continue;
          closed = false;
          auto it = std::lower_bound(cls.abstract_successors.begin(), cls.abstract_successors.end(), a);
          if (it != cls.abstract_successors.end() && *it == a)
            cls.successor_masks[j * m + static_cast<std::size_t>(it - cls.abstract_successors.begin())] |=
                Mask{1} << position_[t];
        }
      }
      if (closed) cls.closed_mask |= Mask{1} << j;
      if (stuck) cls.stuck_mask |= Mask{1} << j;
    }
  }
}

StateSet AbstractionChecker::consec_closure(StateId concrete_state) const {
  const StateId image = phi_.apply(concrete_state);
  StateSet seen{concrete_state};
  std::vector<StateId> stack{concrete_state};
  while (!stack.empty()) {
    StateId v = stack.back();
    stack.pop_back();
    for (auto w : concrete_graph_.successors(v)) {
      if (phi_.apply(w) != image || std::find(seen.begin(), seen.end(), w) != seen.end()) continue;
      seen.push_back(w);
      stack.push_back(w);
    }
  }
  std::sort(seen.begin(), seen.end());
  return seen;
}

AbstractionChecker::Mask AbstractionChecker::gamma_mask(StateId abstract_state, const StateSet& gamma) const {
  if (abstract_state >= classes_.size()) throw std::invalid_argument("abstract state out of range");
  if (gamma.empty()) throw GammaOutOfClass("gamma must be nonempty");
  Mask mask = 0;
  for (auto c : gamma) {
    if (c >= position_.size() || phi_.apply(c) != abstract_state)
      throw GammaOutOfClass("state " + (c < position_.size() ? concrete_.space().label(c) : std::to_string(c)) +
                            " is not in A(" + abstract_.space().label(abstract_state) + ")");
    mask |= Mask{1} << position_[c];
  }
  return mask;
}

StateSet AbstractionChecker::members_of(StateId abstract_state, Mask mask) const {
  StateSet out;
  const auto& members = classes_[abstract_state].members;
  for (std::size_t j = 0; j < members.size(); ++j)
    if (mask >> j & 1u) out.push_back(members[j]);
  return out;
}

void AbstractionChecker::successor_sets(const ClassData& cls, Mask gamma, std::vector<Mask>& out) const {
  const std::size_t m = cls.abstract_successors.size();
  out.assign(m, 0);
  for (Mask rest = gamma; rest; rest &= rest - 1) {
    const std::size_t j = static_cast<std::size_t>(std::countr_zero(rest));
    for (std::size_t i = 0; i < m; ++i) out[i] |= cls.successor_masks[j * m + i];
  }
}

TermStatus AbstractionChecker::status_of(const ClassData& cls, Mask gamma, const std::vector<Mask>& succ,
                                         ValidityRule rule) const {
  for (auto t : succ)
    if (t == 0) return TermStatus::kMissingSuccessor;
  if (cls.abstract_successors.empty()) {
    const bool ok = rule == ValidityRule::kStuckRun ? (gamma & cls.stuck_mask) != 0 : (gamma & ~cls.closed_mask) == 0;
    if (!ok) return TermStatus::kPointAttractorEscapes;
  }
  return TermStatus::kValid;
}

StepTerm AbstractionChecker::term_from_mask(StateId abstract_state, Mask gamma, ValidityRule rule) const {
  const auto& cls = classes_[abstract_state];
  std::vector<Mask> succ;
  successor_sets(cls, gamma, succ);
  StepTerm term;
  term.state = abstract_state;
  term.gamma = members_of(abstract_state, gamma);
  for (std::size_t i = 0; i < succ.size(); ++i) {
    const StateId target = cls.abstract_successors[i];
    term.successors.emplace_back(target, members_of(target, succ[i]));
  }
  term.status = status_of(cls, gamma, succ, rule);
  return term;
}

StepTerm AbstractionChecker::make_step_term(StateId abstract_state, const StateSet& gamma, ValidityRule rule) const {
  return term_from_mask(abstract_state, gamma_mask(abstract_state, gamma), rule);
}

std::vector<StepTerm> AbstractionChecker::all_step_terms(StateId abstract_state, ValidityRule rule) const {
  if (abstract_state >= classes_.size()) throw std::invalid_argument("abstract state out of range");
  std::vector<StepTerm> out;
  const Mask full = (Mask{1} << classes_[abstract_state].members.size()) - 1;
  for (Mask g = 1; g && g <= full; ++g) {
    auto term = term_from_mask(abstract_state, g, rule);
    if (term.valid()) out.push_back(std::move(term));
  }
  return out;
}

CheckResult AbstractionChecker::run(const CheckOptions& options) const {
  const StateId n1 = abstract_graph_.size();
  CheckResult result;
  result.rule = options.rule;
  auto& stats = result.stats;
  stats.abstract_entities = abstract_.entity_count();
  stats.abstract_states = n1;
  stats.concrete_states = concrete_graph_.size();
  for (const auto& cls : classes_) stats.max_class_size = std::max(stats.max_class_size, cls.members.size());

  // C(S) as the ascending list of initially valid Gamma masks, a liveness
  // flag per mask, and the cached successor masks T(S_i) per term.
  std::vector<std::vector<Mask>> terms(n1);
  std::vector<std::vector<std::uint8_t>> alive(n1);
  std::vector<std::vector<Mask>> successors(n1);
  std::vector<std::size_t> live_count(n1, 0);
  std::vector<Mask> scratch;

  auto fail = [&](StateId s, bool at_start) {
    FailureWitness w;
    w.emptied_state = s;
    w.empty_at_start = at_start;
    return w;
  };

  std::optional<StateId> empty_at_start;
  for (StateId s = 0; s < n1; ++s) {
    const auto& cls = classes_[s];
    const Mask full = static_cast<Mask>((std::uint64_t{1} << cls.members.size()) - 1);
    alive[s].assign(std::size_t{full} + 1, 0);
    stats.subsets_tried += full;
    for (Mask g = 1; g && g <= full; ++g) {
      successor_sets(cls, g, scratch);
      if (status_of(cls, g, scratch, options.rule) != TermStatus::kValid) continue;
      terms[s].push_back(g);
      alive[s][g] = 1;
      successors[s].insert(successors[s].end(), scratch.begin(), scratch.end());
    }
    live_count[s] = terms[s].size();
    stats.initial_terms += terms[s].size();
    if (terms[s].empty() && !empty_at_start) empty_at_start = s;
  }

  // (S, Gamma) -> (S_i, T(S_i)) that caused its removal.
  std::map<std::pair<StateId, Mask>, std::pair<StateId, Mask>> removal_cause;
  std::vector<Mask> last_removed(n1, 0);

  auto explain = [&](StateId s) {
    FailureWitness w = fail(s, false);
    std::pair<StateId, Mask> at{s, last_removed[s]};
    for (std::size_t guard = 0; guard <= removal_cause.size(); ++guard) {
      RemovalLink link;
      link.state = at.first;
      link.gamma = members_of(at.first, at.second);
      auto it = removal_cause.find(at);
      if (it == removal_cause.end()) {
        std::vector<Mask> succ;
        successor_sets(classes_[at.first], at.second, succ);
        link.initial_status = status_of(classes_[at.first], at.second, succ, options.rule);
        w.chain.push_back(std::move(link));
        break;
      }
      link.failed_successor = it->second.first;
      link.successor_gamma = members_of(it->second.first, it->second.second);
      w.chain.push_back(std::move(link));
      at = it->second;
    }
    return w;
  };

  if (empty_at_start && options.stop_on_empty) {
    const StateId s = *empty_at_start;
    auto w = fail(s, true);
    const Mask full = static_cast<Mask>((std::uint64_t{1} << classes_[s].members.size()) - 1);
    std::vector<Mask> succ;
    successor_sets(classes_[s], full, succ);
    w.chain.push_back({s, members_of(s, full), status_of(classes_[s], full, succ, options.rule), std::nullopt, {}});
    result.witness = std::move(w);
    return result;
  }

  std::vector<StateId> state_order(n1);
  std::iota(state_order.begin(), state_order.end(), StateId{0});
  std::mt19937_64 rng(options.shuffle_seed.value_or(0));
  std::vector<std::size_t> term_order;
  std::optional<StateId> first_emptied = empty_at_start;

  bool done = false;
  while (!done) {
    done = true;
    ++stats.iterations;
    if (options.shuffle_seed) std::shuffle(state_order.begin(), state_order.end(), rng);
    for (StateId s : state_order) {
      const auto& cls = classes_[s];
      const std::size_t m = cls.abstract_successors.size();
      term_order.resize(terms[s].size());
      std::iota(term_order.begin(), term_order.end(), std::size_t{0});
      if (options.shuffle_seed) std::shuffle(term_order.begin(), term_order.end(), rng);
      for (std::size_t t : term_order) {
        const Mask g = terms[s][t];
        if (!alive[s][g]) continue;
        for (std::size_t i = 0; i < m; ++i) {
          const StateId target = cls.abstract_successors[i];
          const Mask needed = successors[s][t * m + i];
          if (alive[target][needed]) continue;
          alive[s][g] = 0;
          --live_count[s];
          ++stats.removed_terms;
          removal_cause[{s, g}] = {target, needed};
          last_removed[s] = g;
          done = false;
          break;
        }
      }
      if (live_count[s] == 0) {
        if (options.stop_on_empty) {
          result.witness = explain(s);
          return result;
        }
        if (!first_emptied) first_emptied = s;
      }
    }
  }

  result.holds = !first_emptied;
  if (first_emptied) {
    const StateId s = *first_emptied;
    if (terms[s].empty()) {
      const Mask full = static_cast<Mask>((std::uint64_t{1} << classes_[s].members.size()) - 1);
      std::vector<Mask> succ;
      successor_sets(classes_[s], full, succ);
      FailureWitness w = fail(s, true);
      w.chain.push_back({s, members_of(s, full), status_of(classes_[s], full, succ, options.rule), std::nullopt, {}});
      result.witness = std::move(w);
    } else {
      result.witness = explain(s);
    }
  }
  for (StateId s = 0; s < n1; ++s) {
    auto& list = result.surviving[s];
    for (Mask g : terms[s])
      if (alive[s][g]) list.push_back(members_of(s, g));
  }
  return result;
}

Path AbstractionChecker::witness_path(const CheckResult& result, const Path& abstract_path) const {
  if (abstract_path.empty()) throw std::invalid_argument("abstract path is empty");
  for (auto s : abstract_path)
    if (s >= abstract_graph_.size()) throw std::invalid_argument("abstract path leaves the state space");
  for (std::size_t i = 0; i + 1 < abstract_path.size(); ++i)
    if (!abstract_graph_.has_edge(abstract_path[i], abstract_path[i + 1]))
      throw std::invalid_argument("abstract path uses a missing edge " + abstract_.space().label(abstract_path[i]) +
                                  " -> " + abstract_.space().label(abstract_path[i + 1]));
  if (!result.holds) throw NotClosed("check result does not hold; no closed family to chain through");

  auto surviving = [&](StateId s) -> const std::vector<StateSet>& {
    auto it = result.surviving.find(s);
    if (it == result.surviving.end() || it->second.empty())
      throw NotClosed("no surviving step term for " + abstract_.space().label(s));
    return it->second;
  };

  // Forward: Gamma_1 is any surviving term (the largest), Gamma_{j+1} = T(gamma_{j+1}).
  std::vector<Mask> gammas;
  {
    const auto& first = surviving(abstract_path.front());
    auto best = std::max_element(first.begin(), first.end(),
                                 [](const StateSet& a, const StateSet& b) { return a.size() < b.size(); });
    gammas.push_back(gamma_mask(abstract_path.front(), *best));
  }
  std::vector<Mask> succ;
  for (std::size_t j = 0; j + 1 < abstract_path.size(); ++j) {
    const auto& cls = classes_[abstract_path[j]];
    successor_sets(cls, gammas.back(), succ);
    auto it = std::lower_bound(cls.abstract_successors.begin(), cls.abstract_successors.end(), abstract_path[j + 1]);
    const Mask next = succ[static_cast<std::size_t>(it - cls.abstract_successors.begin())];
    const auto& list = surviving(abstract_path[j + 1]);
    if (next == 0 || std::find(list.begin(), list.end(), members_of(abstract_path[j + 1], next)) == list.end())
      throw NotClosed("family is not closed under step terms at " + abstract_.space().label(abstract_path[j + 1]));
    gammas.push_back(next);
  }

  // Backward: pick the last state, then bridge each earlier class.
  Path reversed{members_of(abstract_path.back(), gammas.back()).front()};
  for (std::size_t j = abstract_path.size() - 1; j-- > 0;) {
    const StateId target = reversed.back();
    const StateId image = abstract_path[j];
    std::map<StateId, StateId> parent;
    std::deque<StateId> queue;
    for (auto c : members_of(image, gammas[j])) {
      parent[c] = c;
      queue.push_back(c);
    }
    std::optional<StateId> hit;
    while (!queue.empty() && !hit) {
      StateId v = queue.front();
      queue.pop_front();
      if (concrete_graph_.has_edge(v, target)) {
        hit = v;
        break;
      }
      for (auto w : concrete_graph_.successors(v))
        if (phi_.apply(w) == image && !parent.contains(w)) {
          parent[w] = v;
          queue.push_back(w);
        }
    }
    if (!hit) throw NotClosed("no concrete bridge into " + concrete_.space().label(target));
    for (StateId v = *hit;; v = parent[v]) {
      reversed.push_back(v);
      if (parent[v] == v) break;
    }
  }
  return Path(reversed.rbegin(), reversed.rend());
}

CheckResult check_asyn_abs(const Network& abstract_net, const Network& concrete_net, const AbstractionMapping& phi,
                           const CheckOptions& options) {
  return AbstractionChecker(abstract_net, concrete_net, phi).run(options);
}

}  // namespace mvn
