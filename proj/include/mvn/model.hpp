#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mvn {

using Level = std::uint8_t;
using StateId = std::uint32_t;

/// Largest max_level accepted for an entity.  Keeps packed state ids and
/// row indices small.
inline constexpr Level kLevelBound = 15;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Entity {
  std::string name;
  Level max_level = 1;  // state set is {0..max_level}

  friend bool operator==(const Entity&, const Entity&) = default;
};

/// Inputs of one entity's next-state function, in table column order.
/// An empty input list marks an input entity (regulated outside the model).
struct Neighbourhood {
  std::vector<std::size_t> inputs;

  bool is_input_entity() const { return inputs.empty(); }
  friend bool operator==(const Neighbourhood&, const Neighbourhood&) = default;
};

/// Explicit next-state table: one output level per input tuple.
struct NextStateTable {
  std::map<std::vector<Level>, Level> rows;

  friend bool operator==(const NextStateTable&, const NextStateTable&) = default;
};

/// A multi-valued network: entities with their level ranges, one
/// neighbourhood and one next-state table per entity.  Plain data; use
/// validate() or construct a Network to check the structural invariants.
struct Mvn {
  std::string name;
  std::vector<Entity> entities;
  std::vector<Neighbourhood> neighbourhoods;
  std::vector<NextStateTable> tables;

  std::optional<std::size_t> find_entity(std::string_view entity_name) const;

  friend bool operator==(const Mvn&, const Mvn&) = default;
};

struct GlobalState {
  std::vector<Level> levels;

  friend auto operator<=>(const GlobalState&, const GlobalState&) = default;
};

struct Diagnostic {
  std::string entity;                       // empty for model-level problems
  std::optional<std::vector<Level>> row;    // offending input tuple, if any
  std::string message;

  std::string to_string() const;
};

std::vector<Diagnostic> validate(const Mvn& model);

/// Product of (max_level + 1) over all entities.
std::uint64_t state_space_size(const Mvn& model);

/// Same entity names (in order) and same neighbourhoods.
bool same_structure(const Mvn& a, const Mvn& b);

enum class LabelStyle { kDigits, kNamed };

/// Mixed-radix numbering of global states.  Entity 0 is the most
/// significant digit, so id order equals lexicographic order of the
/// level tuples.
class StateSpace {
 public:
  StateSpace() = default;
  explicit StateSpace(std::vector<Entity> entities);

  const std::vector<Entity>& entities() const { return entities_; }
  std::size_t entity_count() const { return entities_.size(); }
  StateId size() const { return size_; }

  bool contains(const GlobalState& s) const;
  StateId encode(const GlobalState& s) const;
  GlobalState decode(StateId id) const;

  Level level(StateId id, std::size_t entity) const {
    return static_cast<Level>((id / stride_[entity]) % radix_[entity]);
  }
  StateId with_level(StateId id, std::size_t entity, Level value) const {
    return id - level(id, entity) * stride_[entity] + value * stride_[entity];
  }

  /// "12" style labels; entities with more than 10 levels switch the whole
  /// label to dot separators ("1.12").  kNamed gives "CI=1,Cro=2".
  std::string label(StateId id, LabelStyle style = LabelStyle::kDigits) const;
  /// Inverse of label() for digit labels.  Throws ModelError.
  StateId parse_label(std::string_view text) const;

  friend bool operator==(const StateSpace& a, const StateSpace& b) {
    return a.entities_ == b.entities_;
  }

 private:
  std::vector<Entity> entities_;
  std::vector<StateId> radix_;
  std::vector<StateId> stride_;
  StateId size_ = 0;
  bool dotted_ = false;
};

/// A validated network with dense next-state tables, ready for the update
/// semantics.  Immutable after construction.
class Network {
 public:
  /// Throws ModelError carrying the first diagnostic if the model is invalid.
  explicit Network(Mvn model);

  const Mvn& model() const { return model_; }
  const std::string& name() const { return model_.name; }
  const StateSpace& space() const { return space_; }
  std::size_t entity_count() const { return model_.entities.size(); }
  bool is_input(std::size_t entity) const {
    return model_.neighbourhoods[entity].is_input_entity();
  }

  /// f_entity applied to the neighbourhood projection of `state`.
  Level next_level(std::size_t entity, StateId state) const;

 private:
  Mvn model_;
  StateSpace space_;
  std::vector<std::vector<Level>> dense_;
};

/// Every level tuple over the given ranges, in lexicographic order.
std::vector<std::vector<Level>> input_tuples(const std::vector<Level>& max_levels);

}  // namespace mvn
