#pragma once

#include <string>
#include <vector>

#include "mezzo/ast.hpp"
#include "mezzo/lexer.hpp"

namespace mezzo {

/// Parse a whole program. Call arguments, tuple components, constructor field
/// values, field-write right-hand sides, match scrutinees and if conditions
/// are let-normalized so the checker always sees variables in those positions.
Ast parse_program(const std::vector<Token>& toks, const std::string& file);
Ast parse_source(const std::string& source, const std::string& file);

/// Parse a standalone type expression (the full token list must be consumed).
TypePtr parse_standalone_type(const std::vector<Token>& toks, const std::string& file);
TypePtr parse_type_source(const std::string& source, const std::string& file = "<type>");

} // namespace mezzo
