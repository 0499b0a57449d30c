#include "mvn/abstraction.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace mvn {

namespace {

Path merge_consecutive(const Path& seq) {
  Path out;
  for (auto s : seq)
    if (out.empty() || out.back() != s) out.push_back(s);
  return out;
}

std::vector<Entity> abstract_entities(const StateSpace& concrete,
                                      const std::vector<std::optional<StateMapping>>& slots) {
  std::vector<Entity> out = concrete.entities();
  for (std::size_t i = 0; i < out.size(); ++i)
    if (slots[i]) out[i].max_level = slots[i]->codomain_max();
  return out;
}

}  // namespace

Level StateMapping::codomain_max() const {
  return image.empty() ? 0 : *std::max_element(image.begin(), image.end());
}

bool StateMapping::order_preserving() const { return std::is_sorted(image.begin(), image.end()); }

AbstractionMapping::AbstractionMapping(StateSpace concrete, std::vector<std::optional<StateMapping>> slots)
    : concrete_(std::move(concrete)), slots_(std::move(slots)) {
  const auto& entities = concrete_.entities();
  if (slots_.size() != entities.size())
    throw MappingError("abstraction mapping needs one slot per entity (" + std::to_string(entities.size()) +
                       "), got " + std::to_string(slots_.size()));
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (!slots_[i]) continue;
    const auto& name = entities[i].name;
    const auto& image = slots_[i]->image;
    const unsigned m = entities[i].max_level;
    if (image.size() != m + 1u)
      throw MappingError("mapping for " + name + " must be total on 0.." + std::to_string(m));
    const unsigned n = slots_[i]->codomain_max();
    if (n == 0) throw MappingError("mapping for " + name + " has a codomain of size 1");
    if (n >= m) throw MappingError("mapping for " + name + " does not reduce the range 0.." + std::to_string(m));
    std::set<Level> hit(image.begin(), image.end());
    if (hit.size() != n + 1u) throw MappingError("mapping for " + name + " is not surjective onto 0.." + std::to_string(n));
  }
  abstract_ = StateSpace(abstract_entities(concrete_, slots_));
  image_.resize(concrete_.size());
  for (StateId s = 0; s < concrete_.size(); ++s) {
    StateId a = 0;
    for (std::size_t e = 0; e < entities.size(); ++e) a = abstract_.with_level(a, e, map_level(e, concrete_.level(s, e)));
    image_[s] = a;
  }
}

AbstractionMapping AbstractionMapping::identity(StateSpace concrete) {
  const std::size_t k = concrete.entity_count();
  return AbstractionMapping(std::move(concrete), std::vector<std::optional<StateMapping>>(k));
}

bool AbstractionMapping::is_proper() const {
  return std::any_of(slots_.begin(), slots_.end(), [](const auto& s) { return s.has_value(); });
}

std::vector<std::string> AbstractionMapping::warnings() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < slots_.size(); ++i)
    if (slots_[i] && !slots_[i]->order_preserving())
      out.push_back("mapping for " + concrete_.entities()[i].name + " is not order-preserving");
  return out;
}

GlobalState AbstractionMapping::apply(const GlobalState& concrete) const {
  if (!concrete_.contains(concrete)) throw MappingError("state outside the concrete state space");
  GlobalState out = concrete;
  for (std::size_t e = 0; e < out.levels.size(); ++e) out.levels[e] = map_level(e, out.levels[e]);
  return out;
}

GlobalState abstract_state(const AbstractionMapping& phi, const GlobalState& s) { return phi.apply(s); }

LassoTrace abstract_trace(const AbstractionMapping& phi, const LassoTrace& trace) {
  Path head;
  for (auto s : trace.prefix) head.push_back(phi.apply(s));
  if (trace.finite()) return LassoTrace{merge_consecutive(head), {}};

  Path loop;
  for (auto s : trace.loop) loop.push_back(phi.apply(s));
  const std::size_t n = loop.size();

  // Start the loop at a block boundary so the cyclic merge is a linear one.
  std::size_t r = 0;
  while (r < n && loop[(r + n - 1) % n] == loop[r]) ++r;
  if (r == n) {
    head.push_back(loop.front());
    return LassoTrace{merge_consecutive(head), {}};
  }
  head.insert(head.end(), loop.begin(), loop.begin() + static_cast<std::ptrdiff_t>(r));
  std::rotate(loop.begin(), loop.begin() + static_cast<std::ptrdiff_t>(r), loop.end());

  LassoTrace out{merge_consecutive(head), merge_consecutive(loop)};
  if (!out.prefix.empty() && out.prefix.back() == out.loop.front()) out.prefix.pop_back();
  return canonicalize(std::move(out));
}

TraceSet abstract_trace_set(const AbstractionMapping& phi, const TraceSet& traces) {
  TraceSet out;
  for (const auto& t : traces) out.insert(abstract_trace(phi, t));
  return out;
}

void require_compatible(const Network& abstract_net, const Network& concrete_net, const AbstractionMapping& phi) {
  if (!same_structure(abstract_net.model(), concrete_net.model()))
    throw StructureMismatch("'" + abstract_net.name() + "' and '" + concrete_net.name() +
                            "' do not have the same entities and neighbourhoods");
  if (!(phi.concrete_space() == concrete_net.space()))
    throw MappingMismatch("abstraction mapping was not built for the state space of '" + concrete_net.name() + "'");
  if (!(phi.abstract_space() == abstract_net.space()))
    throw MappingMismatch("entity ranges of '" + abstract_net.name() + "' differ from the mapping's codomain");
  if (!phi.is_proper())
    throw MappingError("abstraction mapping must contain at least one proper state mapping");
}

bool check_sync_abstraction(const Network& abstract_net, const Network& concrete_net, const AbstractionMapping& phi) {
  require_compatible(abstract_net, concrete_net, phi);
  const auto merged = abstract_trace_set(AbstractionMapping::identity(abstract_net.space()), sync_traces(abstract_net));
  const auto image = abstract_trace_set(phi, sync_traces(concrete_net));
  return std::includes(image.begin(), image.end(), merged.begin(), merged.end());
}

std::vector<ChoiceRow> CandidateSet::ambiguous_rows() const {
  std::vector<ChoiceRow> out;
  for (const auto& row : rows)
    if (row.choices.size() > 1) out.push_back(row);
  return out;
}

CandidateSet enumerate_candidates(const Network& concrete, const AbstractionMapping& phi, std::size_t limit) {
  if (!(phi.concrete_space() == concrete.space()))
    throw MappingMismatch("abstraction mapping was not built for the state space of '" + concrete.name() + "'");
  const Mvn& model = concrete.model();
  CandidateSet result;

  for (std::size_t e = 0; e < model.entities.size(); ++e) {
    if (concrete.is_input(e)) continue;
    const auto& inputs = model.neighbourhoods[e].inputs;
    std::map<std::vector<Level>, std::set<Level>> choices;
    for (const auto& [tuple, out] : model.tables[e].rows) {
      std::vector<Level> u(tuple.size());
      for (std::size_t c = 0; c < tuple.size(); ++c) u[c] = phi.map_level(inputs[c], tuple[c]);
      choices[u].insert(phi.map_level(e, out));
    }
    for (auto& [u, d] : choices) result.rows.push_back({e, u, std::vector<Level>(d.begin(), d.end())});
  }

  const auto ambiguous = result.ambiguous_rows();
  std::size_t total = 1;
  for (const auto& row : ambiguous) {
    total *= row.choices.size();
    if (total > limit) throw MappingError("more than " + std::to_string(limit) + " candidate models");
  }

  Mvn base;
  base.name = model.name;
  base.entities = phi.abstract_space().entities();
  base.neighbourhoods = model.neighbourhoods;
  base.tables.resize(model.entities.size());
  for (std::size_t e = 0; e < model.entities.size(); ++e)
    if (concrete.is_input(e)) base.tables[e].rows[{}] = 0;
  for (const auto& row : result.rows) base.tables[row.entity].rows[row.inputs] = row.choices.front();

  result.candidates.reserve(total);
  for (std::size_t index = 0; index < total; ++index) {
    Mvn cand = base;
    cand.name = model.name + "_cand" + std::to_string(index);
    std::size_t rest = index;
    for (std::size_t a = ambiguous.size(); a-- > 0;) {
      const auto& row = ambiguous[a];
      cand.tables[row.entity].rows[row.inputs] = row.choices[rest % row.choices.size()];
      rest /= row.choices.size();
    }
    result.candidates.push_back(std::move(cand));
  }
  return result;
}

}  // namespace mvn
