#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "mvn/oracle.hpp"

namespace mvn {

using Json = nlohmann::ordered_json;

/// Graphviz digraph: every state as a node, then edges in id order.
std::string export_dot(const StateGraph& graph, std::string_view name = "mvn",
                       LabelStyle style = LabelStyle::kDigits);

Json to_json(const AttractorSet& set, const StateSpace& space, LabelStyle style = LabelStyle::kDigits);
Json to_json(const TraceSet& traces, const StateSpace& space, LabelStyle style = LabelStyle::kDigits);
Json to_json(const CheckResult& result, const StateSpace& abstract_space, const StateSpace& concrete_space,
             LabelStyle style = LabelStyle::kDigits);
Json to_json(const DifferentialReport& report);

}  // namespace mvn
