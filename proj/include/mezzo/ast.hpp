#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mezzo/diagnostics.hpp"

namespace mezzo {

using VarId = int;
constexpr VarId kNoVar = -1;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

struct TypeExpr;
using TypePtr = std::shared_ptr<const TypeExpr>;

struct ArrowParam {
    std::string binder; // empty when anonymous
    bool consumed = false;
    TypePtr type;
};

struct StructField {
    std::string name;
    TypePtr type;
};

/// One `x @ t` atom inside a bar type. The subject starts as a binder name
/// and is replaced by a variable id when the checker instantiates it.
struct PermAtomExpr {
    std::string subject_name;
    VarId subject = kNoVar;
    TypePtr type;
};

struct TypeExpr {
    enum class Kind {
        Var,        // type variable `a`
        Nominal,    // `mtree a`, `list int`
        Tuple,      // `(t, u)`
        Arrow,      // `(consumes x: t, u) -> r`
        Structural, // `Node { left: t; ... }`
        Singleton,  // `=x`
        Bar,        // `(t | x @ u * ...)`
        Forall,     // `[a] t`
        Int,
        String,
    };

    Kind kind = Kind::Int;
    std::string name;              // Var / Nominal / Structural ctor / Singleton binder name
    VarId var = kNoVar;            // Singleton: resolved subject
    std::vector<TypePtr> args;     // Nominal arguments, Tuple components
    std::vector<ArrowParam> params;
    TypePtr ret;                   // Arrow return
    std::vector<StructField> fields;
    TypePtr inner;                 // Bar value type
    std::vector<PermAtomExpr> perms;
    std::vector<std::string> binders; // Forall
    Loc loc;
};

TypePtr make_type_var(std::string name, Loc loc = {});
TypePtr make_nominal(std::string name, std::vector<TypePtr> args, Loc loc = {});
TypePtr make_tuple_type(std::vector<TypePtr> comps, Loc loc = {});
TypePtr make_arrow(std::vector<ArrowParam> params, TypePtr ret, Loc loc = {});
TypePtr make_structural(std::string ctor, std::vector<StructField> fields, Loc loc = {});
TypePtr make_singleton_name(std::string binder, Loc loc = {});
TypePtr make_singleton_var(VarId var);
TypePtr make_bar(TypePtr inner, std::vector<PermAtomExpr> perms, Loc loc = {});
TypePtr make_forall(std::vector<std::string> binders, TypePtr body, Loc loc = {});
TypePtr make_int_type(Loc loc = {});
TypePtr make_string_type(Loc loc = {});

/// Structural equality; Singleton nodes compare by resolved var when both are
/// resolved, by name otherwise. Locations are ignored.
bool type_equal(const TypePtr& a, const TypePtr& b);

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct MatchBranch {
    std::string ctor;
    ExprPtr body;
    Loc loc;
};

struct Expr {
    enum class Kind {
        Var,
        IntLit,
        StrLit,
        Tuple,
        Let,
        Match,
        If,
        FieldRead,
        FieldWrite,
        Call,
        CtorAlloc,
        Seq,
    };

    Kind kind = Kind::Var;
    Loc loc;

    std::string name;            // Var / FieldRead+Write field / CtorAlloc ctor
    long int_value = 0;
    std::string str_value;
    std::vector<ExprPtr> items;  // Tuple components, Call args
    // Let
    std::vector<std::string> pattern; // one name, or n names for a tuple pattern
    ExprPtr rhs;
    ExprPtr body;
    // Match / If
    ExprPtr scrutinee; // also the if condition
    std::vector<MatchBranch> branches;
    ExprPtr then_arm;
    ExprPtr else_arm;
    // FieldRead / FieldWrite / Call
    ExprPtr object;  // also the callee
    ExprPtr written; // FieldWrite rhs (a Var after parsing)
    std::optional<std::vector<TypePtr>> type_args;
    std::vector<std::pair<std::string, ExprPtr>> field_inits; // CtorAlloc
    // Seq
    ExprPtr first;
    ExprPtr second;
};

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

struct DataBranch {
    std::string ctor;
    std::vector<StructField> fields;
    Loc loc;
};

struct DataDecl {
    std::string name;
    bool is_mutable = false;
    std::vector<std::string> params;
    std::vector<DataBranch> branches;
    Loc loc;
};

struct ValDef {
    std::string name;
    std::vector<std::string> typarams;
    std::optional<std::vector<ArrowParam>> params; // nullopt: plain value
    TypePtr ret;                                   // required for functions
    ExprPtr body;
    Loc loc;

    bool is_function() const { return params.has_value(); }
};

struct ValGroup {
    bool is_rec = false;
    std::vector<ValDef> defs;
};

using Decl = std::variant<DataDecl, ValGroup>;

struct Ast {
    std::vector<Decl> decls;
};

bool expr_equal(const ExprPtr& a, const ExprPtr& b);
bool ast_equal(const Ast& a, const Ast& b);

} // namespace mezzo
