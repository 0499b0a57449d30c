#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mvn/model_io.hpp"

namespace support {

inline std::string fixture(const std::string& file) { return std::string(MVN_FIXTURE_DIR) + "/" + file; }

inline mvn::Mvn load(const std::string& file) { return mvn::parse_model(mvn::read_text_file(fixture(file))); }

inline mvn::AbstractionMapping load_map(const std::string& file, const mvn::Mvn& concrete) {
  return mvn::parse_mapping(mvn::read_text_file(fixture(file)), concrete);
}

inline std::vector<mvn::StateId> ids(const mvn::StateSpace& space, const std::vector<std::string>& labels) {
  std::vector<mvn::StateId> out;
  for (const auto& l : labels) out.push_back(space.parse_label(l));
  return out;
}

inline std::set<std::pair<std::string, std::string>> edge_labels(const mvn::StateGraph& g) {
  std::set<std::pair<std::string, std::string>> out;
  for (mvn::StateId s = 0; s < g.size(); ++s)
    for (auto t : g.successors(s)) out.emplace(g.space().label(s), g.space().label(t));
  return out;
}

/// Lasso trace from prefix and loop labels.
inline mvn::LassoTrace lasso(const mvn::StateSpace& space, const std::vector<std::string>& prefix,
                             const std::vector<std::string>& loop = {}) {
  return {ids(space, prefix), ids(space, loop)};
}

}  // namespace support
