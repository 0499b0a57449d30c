#include "mvn/model_io.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace mvn {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + (column ? ":" + std::to_string(column) : "") + ": " +
                         message),
      line_(line),
      column_(column),
      reason_(message) {}

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '\'';
}

/// Cursor over one logical line (comment already stripped).
class LineScanner {
 public:
  LineScanner(std::string_view text, std::size_t line_no) : text_(text), line_(line_no) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }
  std::size_t column() const { return pos_ + 1; }
  /// Column of the next token.
  std::size_t token_column() {
    skip_space();
    return pos_ + 1;
  }
  std::size_t line() const { return line_; }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(line_, pos_ + 1, message); }

  std::string identifier(const char* what) {
    skip_space();
    if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) fail(std::string("expected ") + what);
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  unsigned number(const char* what) {
    skip_space();
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      fail(std::string("expected ") + what);
    unsigned value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + static_cast<unsigned>(text_[pos_] - '0');
      if (value > 1000) fail("number too large");
      ++pos_;
    }
    return value;
  }

  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("expected '" + std::string(token) + "'");
  }

  bool peek_digit() {
    skip_space();
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

std::vector<std::pair<std::size_t, std::string>> logical_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.emplace_back(line_no, std::move(line));
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

struct Positions {
  std::map<std::size_t, std::size_t> entity_line;
  std::map<std::size_t, std::size_t> table_line;
};

Mvn parse_document(std::string_view text, Positions& pos) {
  Mvn model;
  std::vector<bool> has_neighbourhood;
  std::vector<bool> has_table;
  std::optional<std::size_t> current_table;

  for (auto& [line_no, content] : logical_lines(text)) {
    LineScanner sc(content, line_no);
    if (sc.at_end()) continue;

    if (sc.peek_digit() || sc.accept("->")) {
      if (!current_table) sc.fail("table row outside a table block");
      LineScanner row(content, line_no);
      const std::size_t e = *current_table;
      const auto& inputs = model.neighbourhoods[e].inputs;
      std::vector<std::vector<Level>> columns;
      while (!row.accept("->")) {
        if (row.at_end()) row.fail("expected '->'");
        std::vector<Level> alternatives;
        const std::size_t col = columns.size();
        do {
          const std::size_t at = row.token_column();
          unsigned v = row.number("input level");
          if (col < inputs.size() && v > model.entities[inputs[col]].max_level)
            throw ParseError(line_no, at,
                             "level " + std::to_string(v) + " out of range for " + model.entities[inputs[col]].name);
          alternatives.push_back(static_cast<Level>(v));
        } while (row.accept(","));
        columns.push_back(std::move(alternatives));
      }
      if (columns.size() != inputs.size())
        row.fail("row has " + std::to_string(columns.size()) + " input columns, neighbourhood of " +
                 model.entities[e].name + " has " + std::to_string(inputs.size()));
      const std::size_t at = row.token_column();
      unsigned out = row.number("output level");
      if (out > model.entities[e].max_level)
        throw ParseError(line_no, at,
                         "output level " + std::to_string(out) + " out of range for " + model.entities[e].name);
      if (!row.at_end()) row.fail("unexpected text after row");

      // Expand shorthand columns by Cartesian product.
      std::vector<std::vector<Level>> tuples{{}};
      for (const auto& alts : columns) {
        std::vector<std::vector<Level>> next;
        for (const auto& t : tuples)
          for (auto v : alts) {
            next.push_back(t);
            next.back().push_back(v);
          }
        tuples = std::move(next);
      }
      auto& rows = model.tables[e].rows;
      for (auto& t : tuples) {
        auto [it, inserted] = rows.emplace(t, static_cast<Level>(out));
        if (!inserted && it->second != out)
          throw ParseError(line_no, 0, "conflicting rows for " + model.entities[e].name);
      }
      continue;
    }

    const std::string keyword = sc.identifier("a keyword");
    if (keyword == "mvn") {
      model.name = sc.identifier("model name");
      current_table.reset();
    } else if (keyword == "entity") {
      const std::size_t at = sc.token_column();
      std::string name = sc.identifier("entity name");
      if (model.find_entity(name)) throw ParseError(line_no, at, "duplicate entity " + name);
      sc.expect(":");
      unsigned lo = sc.number("lower level");
      if (lo != 0) sc.fail("state ranges start at 0");
      sc.expect("..");
      const std::size_t max_at = sc.token_column();
      unsigned hi = sc.number("max level");
      if (hi < 1) throw ParseError(line_no, max_at, "entity " + name + " needs max level >= 1");
      if (hi > kLevelBound)
        throw ParseError(line_no, max_at, "entity " + name + " max level above " + std::to_string(kLevelBound));
      pos.entity_line[model.entities.size()] = line_no;
      model.entities.push_back({name, static_cast<Level>(hi)});
      model.neighbourhoods.emplace_back();
      model.tables.emplace_back();
      has_neighbourhood.push_back(false);
      has_table.push_back(false);
      current_table.reset();
    } else if (keyword == "neighbourhood" || keyword == "neighborhood") {
      const std::size_t at = sc.token_column();
      std::string name = sc.identifier("entity name");
      auto e = model.find_entity(name);
      if (!e) throw ParseError(line_no, at, "unknown entity " + name);
      if (has_neighbourhood[*e]) throw ParseError(line_no, at, "second neighbourhood for " + name);
      if (has_table[*e]) throw ParseError(line_no, at, "neighbourhood of " + name + " declared after its table");
      sc.expect("=");
      sc.expect("[");
      std::vector<std::size_t> inputs;
      if (!sc.accept("]")) {
        do {
          const std::size_t in_at = sc.token_column();
          std::string in = sc.identifier("entity name");
          auto idx = model.find_entity(in);
          if (!idx) throw ParseError(line_no, in_at, "unknown entity " + in);
          for (auto prev : inputs)
            if (prev == *idx) throw ParseError(line_no, in_at, in + " listed twice");
          inputs.push_back(*idx);
        } while (sc.accept(","));
        sc.expect("]");
      }
      model.neighbourhoods[*e].inputs = std::move(inputs);
      has_neighbourhood[*e] = true;
      current_table.reset();
    } else if (keyword == "table") {
      const std::size_t at = sc.token_column();
      std::string name = sc.identifier("entity name");
      auto e = model.find_entity(name);
      if (!e) throw ParseError(line_no, at, "unknown entity " + name);
      if (!has_neighbourhood[*e]) throw ParseError(line_no, at, "table for " + name + " before its neighbourhood");
      if (has_table[*e]) throw ParseError(line_no, at, "second table for " + name);
      sc.expect(":");
      has_table[*e] = true;
      pos.table_line[*e] = line_no;
      current_table = *e;
    } else {
      throw ParseError(line_no, 1, "unknown keyword '" + keyword + "'");
    }
    if (!sc.at_end()) sc.fail("unexpected text");
  }

  for (std::size_t e = 0; e < model.entities.size(); ++e) {
    if (!has_neighbourhood[e])
      throw ParseError(pos.entity_line[e], 0, "no neighbourhood declared for " + model.entities[e].name);
    if (model.neighbourhoods[e].is_input_entity() && model.tables[e].rows.empty()) model.tables[e].rows[{}] = 0;
  }
  if (model.entities.empty()) throw ParseError(1, 0, "model declares no entities");
  return model;
}

}  // namespace

Mvn parse_model_document(std::string_view text) {
  Positions pos;
  return parse_document(text, pos);
}

Mvn parse_model(std::string_view text) {
  Positions pos;
  Mvn model = parse_document(text, pos);
  auto diags = validate(model);
  if (!diags.empty()) {
    const auto& d = diags.front();
    std::size_t line = 1;
    if (auto e = model.find_entity(d.entity)) {
      if (d.row && pos.table_line.contains(*e))
        line = pos.table_line[*e];
      else
        line = pos.entity_line[*e];
    }
    throw ParseError(line, 0, d.to_string());
  }
  return model;
}

std::string serialize_model(const Mvn& model, std::string_view header) {
  std::ostringstream out;
  if (!header.empty()) {
    std::istringstream lines{std::string(header)};
    std::string line;
    while (std::getline(lines, line)) out << "# " << line << '\n';
  }
  out << "mvn " << (model.name.empty() ? "unnamed" : model.name) << '\n';
  for (const auto& e : model.entities) out << "entity " << e.name << " : 0.." << unsigned{e.max_level} << '\n';
  for (std::size_t i = 0; i < model.entities.size(); ++i) {
    out << "neighbourhood " << model.entities[i].name << " = [";
    const auto& inputs = model.neighbourhoods[i].inputs;
    for (std::size_t c = 0; c < inputs.size(); ++c) out << (c ? ", " : "") << model.entities[inputs[c]].name;
    out << "]\n";
  }
  for (std::size_t i = 0; i < model.entities.size(); ++i) {
    const auto& rows = model.tables[i].rows;
    if (model.neighbourhoods[i].is_input_entity() && rows.size() == 1 && rows.begin()->second == 0) continue;
    out << "\ntable " << model.entities[i].name << ":\n";
    for (const auto& [tuple, level] : rows) {
      out << " ";
      for (auto v : tuple) out << ' ' << unsigned{v};
      out << " -> " << unsigned{level} << '\n';
    }
  }
  return out.str();
}

AbstractionMapping parse_mapping(std::string_view text, const Mvn& model) {
  const StateSpace space(model.entities);
  std::vector<std::optional<StateMapping>> slots(model.entities.size());
  std::vector<bool> seen(model.entities.size(), false);

  for (auto& [line_no, content] : logical_lines(text)) {
    std::size_t offset = 0;
    while (offset <= content.size()) {
      std::size_t end = content.find(';', offset);
      if (end == std::string::npos) end = content.size();
      std::string clause = content.substr(offset, end - offset);
      const std::size_t base = offset;
      offset = end + 1;

      LineScanner sc(clause, line_no);
      if (sc.at_end()) continue;
      auto at = [&](std::size_t col) { return base + col; };
      const std::size_t name_at = sc.token_column();
      std::string name = sc.identifier("entity name");
      auto e = model.find_entity(name);
      if (!e) throw ParseError(line_no, at(name_at), "unknown entity " + name);
      if (seen[*e]) throw ParseError(line_no, at(name_at), "second clause for " + name);
      seen[*e] = true;
      sc.expect(":");
      if (sc.accept("identity")) {
        if (!sc.at_end()) sc.fail("unexpected text after identity");
        continue;
      }
      const unsigned m = model.entities[*e].max_level;
      std::vector<std::optional<Level>> image(m + 1);
      do {
        const std::size_t from_at = sc.token_column();
        unsigned from = sc.number("source level");
        if (from > m) throw ParseError(line_no, at(from_at), "level " + std::to_string(from) + " outside 0.." + std::to_string(m));
        if (image[from]) throw ParseError(line_no, at(from_at), "level " + std::to_string(from) + " mapped twice");
        sc.expect("->");
        unsigned to = sc.number("target level");
        if (to > kLevelBound) sc.fail("target level too large");
        image[from] = static_cast<Level>(to);
      } while (sc.accept(","));
      if (!sc.at_end()) sc.fail("expected ',' or ';'");

      StateMapping mapping;
      for (unsigned v = 0; v <= m; ++v) {
        if (!image[v])
          throw ParseError(line_no, at(name_at), "mapping for " + name + " is not total on 0.." + std::to_string(m) +
                                                     " (level " + std::to_string(v) + " missing)");
        mapping.image.push_back(*image[v]);
      }
      // Per-slot checks with the clause position attached.
      std::vector<std::optional<StateMapping>> probe(model.entities.size());
      probe[*e] = mapping;
      try {
        AbstractionMapping(space, probe);
      } catch (const MappingError& err) {
        throw ParseError(line_no, at(name_at), err.what());
      }
      slots[*e] = std::move(mapping);
    }
  }
  return AbstractionMapping(space, std::move(slots));
}

std::string serialize_mapping(const AbstractionMapping& phi) {
  std::ostringstream out;
  const auto& entities = phi.concrete_space().entities();
  for (std::size_t e = 0; e < entities.size(); ++e) {
    out << entities[e].name << ": ";
    if (!phi.slot(e)) {
      out << "identity\n";
      continue;
    }
    const auto& image = phi.slot(e)->image;
    for (std::size_t v = 0; v < image.size(); ++v) out << (v ? ", " : "") << v << "->" << unsigned{image[v]};
    out << '\n';
  }
  return out.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace mvn
