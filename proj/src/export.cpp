#include "mvn/report.hpp"

#include <sstream>

namespace mvn {

namespace {

std::string quoted(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

Json labels(const std::vector<StateId>& states, const StateSpace& space, LabelStyle style) {
  Json out = Json::array();
  for (auto s : states) out.push_back(space.label(s, style));
  return out;
}

}  // namespace

std::string export_dot(const StateGraph& graph, std::string_view name, LabelStyle style) {
  std::ostringstream out;
  out << "digraph " << quoted(name) << " {\n";
  const auto& space = graph.space();
  for (StateId s = 0; s < graph.size(); ++s) out << "  " << quoted(space.label(s, style)) << ";\n";
  for (StateId s = 0; s < graph.size(); ++s)
    for (auto t : graph.successors(s))
      out << "  " << quoted(space.label(s, style)) << " -> " << quoted(space.label(t, style)) << ";\n";
  out << "}\n";
  return out.str();
}

Json to_json(const AttractorSet& set, const StateSpace& space, LabelStyle style) {
  Json list = Json::array();
  for (const auto& a : set.attractors) {
    Json item;
    item["kind"] = std::string(to_string(a.kind));
    item["states"] = labels(a.states, space, style);
    item["terminal"] = a.terminal;
    item["exit_edges"] = a.exit_edges;
    list.push_back(std::move(item));
  }
  Json out;
  out["semantics"] = std::string(to_string(set.semantics));
  out["attractors"] = std::move(list);
  return out;
}

Json to_json(const TraceSet& traces, const StateSpace& space, LabelStyle style) {
  Json list = Json::array();
  for (const auto& t : traces) {
    Json item;
    item["prefix"] = labels(t.prefix, space, style);
    item["loop"] = labels(t.loop, space, style);
    list.push_back(std::move(item));
  }
  Json out;
  out["count"] = traces.size();
  out["traces"] = std::move(list);
  return out;
}

Json to_json(const CheckResult& result, const StateSpace& abstract_space, const StateSpace& concrete_space,
             LabelStyle style) {
  Json out;
  out["holds"] = result.holds;
  out["rule"] = std::string(to_string(result.rule));
  const auto& st = result.stats;
  out["statistics"] = {{"abstract_entities", st.abstract_entities}, {"abstract_states", st.abstract_states},
                       {"concrete_states", st.concrete_states},     {"max_class_size", st.max_class_size},
                       {"subsets_tried", st.subsets_tried},         {"initial_terms", st.initial_terms},
                       {"removed_terms", st.removed_terms},         {"iterations", st.iterations}};
  Json surviving = Json::object();
  for (const auto& [state, family] : result.surviving) {
    Json sets = Json::array();
    for (const auto& gamma : family) sets.push_back(labels(gamma, concrete_space, style));
    surviving[abstract_space.label(state, style)] = {{"count", family.size()}, {"gammas", std::move(sets)}};
  }
  out["surviving"] = std::move(surviving);
  if (result.witness) {
    const auto& w = *result.witness;
    Json chain = Json::array();
    for (const auto& link : w.chain) {
      Json item;
      item["state"] = abstract_space.label(link.state, style);
      item["gamma"] = labels(link.gamma, concrete_space, style);
      item["initial_status"] = std::string(to_string(link.initial_status));
      if (link.failed_successor) {
        item["failed_successor"] = abstract_space.label(*link.failed_successor, style);
        item["successor_gamma"] = labels(link.successor_gamma, concrete_space, style);
      }
      chain.push_back(std::move(item));
    }
    out["witness"] = {{"emptied_state", abstract_space.label(w.emptied_state, style)},
                      {"empty_at_start", w.empty_at_start},
                      {"chain", std::move(chain)}};
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

Json to_json(const DifferentialReport& report) {
  Json out;
  out["seed"] = report.seed;
  out["count"] = report.count;
  out["rule"] = std::string(to_string(report.rule));
  out["supported"] = report.supported;
  out["holds"] = report.holds;
  out["unsupported"] = report.unsupported;
  out["unsupported_holds"] = report.unsupported_holds;
  std::size_t prefix_failures = 0;
  for (const auto& u : report.unsupported_instances) prefix_failures += u.prefix_check_passed ? 0 : 1;
  out["unsupported_prefix_failures"] = prefix_failures;
  Json divergences = Json::array();
  for (const auto& d : report.divergences)
    divergences.push_back({{"index", d.index},
                           {"instance_seed", d.instance_seed},
                           {"checker", d.checker},
                           {"oracle", d.oracle},
                           {"subset_oracle", d.subset_oracle},
                           {"finite", d.finite},
                           {"abstract", d.abstract_source},
                           {"concrete", d.concrete_source},
                           {"mapping", d.mapping_source}});
  out["divergences"] = std::move(divergences);
  return out;
}

}  // namespace mvn
