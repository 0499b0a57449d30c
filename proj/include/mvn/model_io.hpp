#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mvn/abstraction.hpp"

namespace mvn {

/// Positioned error in a `.mvn` or `.map` document (1-based line/column;
/// column 0 when the whole line is meant).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string reason_;
};

// Model documents are line oriented; `#` starts a comment.
//
//   mvn PL2
//   entity CI : 0..1
//   entity Cro : 0..2
//   neighbourhood CI = [CI, Cro]
//   neighbourhood Cro = [CI, Cro]
//   table CI:
//     0 0 -> 1
//     0 1,2 -> 0        # shorthand: any of the listed levels
//   ...
//
// Input entities declare `neighbourhood X = []` and may omit their table.

/// Syntax and reference checks only; the result may still fail validate().
Mvn parse_model_document(std::string_view text);

/// parse_model_document() followed by validate(); the first diagnostic is
/// reported as a ParseError at the offending table or entity.
Mvn parse_model(std::string_view text);

/// Explicit rows, declaration order.  `header` lines are emitted as comments.
std::string serialize_model(const Mvn& model, std::string_view header = {});

// Mapping documents hold one clause per entity, separated by newlines or
// `;`:   `Cro: 0->0, 1->1, 2->1`   or   `CI: identity`.
// Entities without a clause map by identity.

AbstractionMapping parse_mapping(std::string_view text, const Mvn& model);

std::string serialize_mapping(const AbstractionMapping& phi);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace mvn
