#pragma once

#include <functional>
#include <string>

#include "mezzo/ast.hpp"

namespace mezzo {

/// Resolves a variable id to its display name (used for singleton types and
/// bar permissions whose subjects have been resolved by the checker).
using VarNamer = std::function<std::string(VarId)>;

/// Prints a type in concrete syntax; the output reparses to an equal type.
std::string print_type(const TypePtr& t, const VarNamer* namer = nullptr);

/// Prints an expression; the output reparses to an equal expression.
std::string print_expr(const ExprPtr& e);

/// Prints a whole program; the output reparses to an equal Ast.
std::string print_program(const Ast& ast);

} // namespace mezzo
