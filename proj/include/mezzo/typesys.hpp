#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "mezzo/ast.hpp"
#include "mezzo/diagnostics.hpp"

namespace mezzo {

struct DeclTable {
    std::map<std::string, DataDecl> decls;
    // constructor name -> (declaration name, branch index)
    std::map<std::string, std::pair<std::string, size_t>> ctors;
};

/// Declaration lookup plus the abstract type variables currently in scope.
/// Abstract variables are assumed affine.
struct TypeContext {
    std::shared_ptr<const DeclTable> table;
    std::set<std::string> tyvars;

    const DataDecl* decl(const std::string& name) const;
    const DataDecl* decl_of_ctor(const std::string& ctor, size_t* branch = nullptr) const;
};

/// Builds the declaration table, reporting duplicate type, constructor, or
/// out-of-scope type-variable violations.
TypeContext make_context(const Ast& ast, const std::string& file,
                         std::vector<Diagnostic>& out);

/// Accepts iff nominal applications are saturated, variables are bound,
/// structural types carry exactly their declared fields, and singleton or bar
/// subjects name a binder in `value_binders`.
bool kind_check(const TypeContext& ctx, const TypePtr& t,
                const std::set<std::string>& value_binders, const std::string& file,
                std::vector<Diagnostic>& out);

enum class Mode { Duplicable, Exclusive, Affine };

const char* mode_name(Mode m);

/// Join used for tuples and immutable constructor fields: duplicable only
/// when every component is, affine otherwise (a tuple is immutable, so it is
/// never exclusive, but it cannot be duplicated around an exclusive part).
Mode tuple_mode_join(Mode a, Mode b);

/// Least mode of a well-formed type. Nominal types of immutable declarations
/// are resolved by a greatest fixed point: recursive occurrences are
/// optimistically duplicable and any affine or exclusive field demotes.
Mode infer_mode(const TypeContext& ctx, const TypePtr& t);

/// Capture-avoiding substitution of type variables by types.
TypePtr substitute_tyvars(const TypePtr& t,
                          const std::map<std::string, TypePtr>& subst);

/// Replaces named singleton and bar-permission subjects by variable ids.
TypePtr substitute_binders(const TypePtr& t, const std::map<std::string, VarId>& subst);

} // namespace mezzo
