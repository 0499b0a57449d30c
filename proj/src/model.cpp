#include "mvn/model.hpp"

#include <set>
#include <sstream>

namespace mvn {

namespace {

constexpr std::uint64_t kMaxStates = std::uint64_t{1} << 31;

std::string tuple_text(const std::vector<Level>& row) {
  std::string out = "(";
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(row[i]);
  }
  return out + ")";
}

}  // namespace

std::optional<std::size_t> Mvn::find_entity(std::string_view entity_name) const {
  for (std::size_t i = 0; i < entities.size(); ++i)
    if (entities[i].name == entity_name) return i;
  return std::nullopt;
}

std::string Diagnostic::to_string() const {
  std::string out;
  if (!entity.empty()) out += "entity " + entity + ": ";
  if (row) out += "row " + tuple_text(*row) + ": ";
  return out + message;
}

std::vector<std::vector<Level>> input_tuples(const std::vector<Level>& max_levels) {
  std::vector<std::vector<Level>> out;
  std::vector<Level> current(max_levels.size(), 0);
  for (;;) {
    out.push_back(current);
    std::size_t pos = current.size();
    while (pos > 0) {
      --pos;
      if (current[pos] < max_levels[pos]) {
        ++current[pos];
        break;
      }
      current[pos] = 0;
      if (pos == 0) return out;
    }
    if (current.empty()) return out;
  }
}

std::vector<Diagnostic> validate(const Mvn& model) {
  std::vector<Diagnostic> diags;
  const std::size_t k = model.entities.size();
  if (k == 0) diags.push_back({"", std::nullopt, "model has no entities"});
  if (model.neighbourhoods.size() != k)
    diags.push_back({"", std::nullopt, "expected one neighbourhood per entity"});
  if (model.tables.size() != k)
    diags.push_back({"", std::nullopt, "expected one table per entity"});

  std::set<std::string> names;
  for (const auto& e : model.entities) {
    if (e.name.empty()) diags.push_back({"", std::nullopt, "entity with empty name"});
    if (!names.insert(e.name).second)
      diags.push_back({e.name, std::nullopt, "duplicate entity name"});
    if (e.max_level < 1 || e.max_level > kLevelBound)
      diags.push_back({e.name, std::nullopt,
                       "max_level " + std::to_string(e.max_level) + " outside 1.." +
                           std::to_string(kLevelBound)});
  }
  if (!diags.empty()) return diags;

  std::uint64_t size = 1;
  for (const auto& e : model.entities) size *= e.max_level + 1u;
  if (size > kMaxStates)
    diags.push_back({"", std::nullopt, "state space too large (" + std::to_string(size) + " states)"});

  for (std::size_t i = 0; i < k; ++i) {
    const auto& name = model.entities[i].name;
    const auto& inputs = model.neighbourhoods[i].inputs;
    std::vector<Level> ranges;
    bool bad_input = false;
    std::set<std::size_t> seen;
    for (auto in : inputs) {
      if (in >= k) {
        diags.push_back({name, std::nullopt, "neighbourhood refers to unknown entity index " + std::to_string(in)});
        bad_input = true;
        continue;
      }
      if (!seen.insert(in).second)
        diags.push_back({name, std::nullopt, "neighbourhood lists " + model.entities[in].name + " twice"});
      ranges.push_back(model.entities[in].max_level);
    }
    if (bad_input) continue;

    const auto& rows = model.tables[i].rows;
    for (const auto& [tuple, out] : rows) {
      if (tuple.size() != inputs.size()) {
        diags.push_back({name, tuple, "row has " + std::to_string(tuple.size()) + " inputs, expected " +
                                          std::to_string(inputs.size())});
        continue;
      }
      for (std::size_t c = 0; c < tuple.size(); ++c)
        if (tuple[c] > ranges[c])
          diags.push_back({name, tuple, "input " + model.entities[inputs[c]].name + " level " +
                                            std::to_string(tuple[c]) + " out of range"});
      if (out > model.entities[i].max_level)
        diags.push_back({name, tuple, "output level " + std::to_string(out) + " exceeds max_level " +
                                          std::to_string(model.entities[i].max_level)});
    }
    for (const auto& tuple : input_tuples(ranges))
      if (!rows.contains(tuple)) diags.push_back({name, tuple, "missing row (table is not total)"});
  }
  return diags;
}

std::uint64_t state_space_size(const Mvn& model) {
  std::uint64_t size = 1;
  for (const auto& e : model.entities) size *= e.max_level + 1u;
  return size;
}

bool same_structure(const Mvn& a, const Mvn& b) {
  if (a.entities.size() != b.entities.size()) return false;
  for (std::size_t i = 0; i < a.entities.size(); ++i)
    if (a.entities[i].name != b.entities[i].name) return false;
  return a.neighbourhoods == b.neighbourhoods;
}

StateSpace::StateSpace(std::vector<Entity> entities) : entities_(std::move(entities)) {
  const std::size_t k = entities_.size();
  radix_.resize(k);
  stride_.resize(k);
  std::uint64_t size = 1;
  for (std::size_t i = k; i-- > 0;) {
    stride_[i] = static_cast<StateId>(size);
    radix_[i] = entities_[i].max_level + 1u;
    size *= radix_[i];
    if (size > kMaxStates) throw ModelError("state space too large");
    if (entities_[i].max_level >= 10) dotted_ = true;
  }
  size_ = static_cast<StateId>(size);
}

bool StateSpace::contains(const GlobalState& s) const {
  if (s.levels.size() != entities_.size()) return false;
  for (std::size_t i = 0; i < s.levels.size(); ++i)
    if (s.levels[i] > entities_[i].max_level) return false;
  return true;
}

StateId StateSpace::encode(const GlobalState& s) const {
  if (!contains(s)) throw ModelError("global state outside the state space");
  StateId id = 0;
  for (std::size_t i = 0; i < s.levels.size(); ++i) id += s.levels[i] * stride_[i];
  return id;
}

GlobalState StateSpace::decode(StateId id) const {
  GlobalState s;
  s.levels.resize(entities_.size());
  for (std::size_t i = 0; i < entities_.size(); ++i) s.levels[i] = level(id, i);
  return s;
}

std::string StateSpace::label(StateId id, LabelStyle style) const {
  std::string out;
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    if (style == LabelStyle::kNamed) {
      if (i) out += ',';
      out += entities_[i].name + '=' + std::to_string(level(id, i));
    } else {
      if (i && dotted_) out += '.';
      out += std::to_string(level(id, i));
    }
  }
  return out;
}

StateId StateSpace::parse_label(std::string_view text) const {
  GlobalState s;
  if (dotted_) {
    std::string part;
    std::istringstream in{std::string(text)};
    while (std::getline(in, part, '.')) {
      if (part.empty() || part.size() > 2 || part.find_first_not_of("0123456789") != std::string::npos)
        throw ModelError("bad state label '" + std::string(text) + "'");
      s.levels.push_back(static_cast<Level>(std::stoi(part)));
    }
  } else {
    for (char c : text) {
      if (c < '0' || c > '9') throw ModelError("bad state label '" + std::string(text) + "'");
      s.levels.push_back(static_cast<Level>(c - '0'));
    }
  }
  if (!contains(s)) throw ModelError("state label '" + std::string(text) + "' outside the state space");
  return encode(s);
}

Network::Network(Mvn model) : model_(std::move(model)) {
  auto diags = validate(model_);
  if (!diags.empty()) throw ModelError(diags.front().to_string());
  space_ = StateSpace(model_.entities);

  dense_.resize(model_.entities.size());
  for (std::size_t i = 0; i < model_.entities.size(); ++i) {
    std::vector<Level> ranges;
    for (auto in : model_.neighbourhoods[i].inputs) ranges.push_back(model_.entities[in].max_level);
    auto tuples = input_tuples(ranges);
    dense_[i].reserve(tuples.size());
    // input_tuples() is lexicographic, matching the radix used by next_level().
    for (const auto& t : tuples) dense_[i].push_back(model_.tables[i].rows.at(t));
  }
}

Level Network::next_level(std::size_t entity, StateId state) const {
  const auto& inputs = model_.neighbourhoods[entity].inputs;
  std::size_t row = 0;
  for (auto in : inputs) row = row * (model_.entities[in].max_level + 1u) + space_.level(state, in);
  return dense_[entity][row];
}

}  // namespace mvn
