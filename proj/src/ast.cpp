#include "mezzo/ast.hpp"

namespace mezzo {

namespace {

std::shared_ptr<TypeExpr> fresh(TypeExpr::Kind k, Loc loc) {
    auto t = std::make_shared<TypeExpr>();
    t->kind = k;
    t->loc = loc;
    return t;
}

} // namespace

TypePtr make_type_var(std::string name, Loc loc) {
    auto t = fresh(TypeExpr::Kind::Var, loc);
    t->name = std::move(name);
    return t;
}

TypePtr make_nominal(std::string name, std::vector<TypePtr> args, Loc loc) {
    auto t = fresh(TypeExpr::Kind::Nominal, loc);
    t->name = std::move(name);
    t->args = std::move(args);
    return t;
}

TypePtr make_tuple_type(std::vector<TypePtr> comps, Loc loc) {
    auto t = fresh(TypeExpr::Kind::Tuple, loc);
    t->args = std::move(comps);
    return t;
}

TypePtr make_arrow(std::vector<ArrowParam> params, TypePtr ret, Loc loc) {
    auto t = fresh(TypeExpr::Kind::Arrow, loc);
    t->params = std::move(params);
    t->ret = std::move(ret);
    return t;
}

TypePtr make_structural(std::string ctor, std::vector<StructField> fields, Loc loc) {
    auto t = fresh(TypeExpr::Kind::Structural, loc);
    t->name = std::move(ctor);
    t->fields = std::move(fields);
    return t;
}

TypePtr make_singleton_name(std::string binder, Loc loc) {
    auto t = fresh(TypeExpr::Kind::Singleton, loc);
    t->name = std::move(binder);
    return t;
}

TypePtr make_singleton_var(VarId var) {
    auto t = fresh(TypeExpr::Kind::Singleton, Loc{});
    t->var = var;
    return t;
}

TypePtr make_bar(TypePtr inner, std::vector<PermAtomExpr> perms, Loc loc) {
    auto t = fresh(TypeExpr::Kind::Bar, loc);
    t->inner = std::move(inner);
    t->perms = std::move(perms);
    return t;
}

TypePtr make_forall(std::vector<std::string> binders, TypePtr body, Loc loc) {
    auto t = fresh(TypeExpr::Kind::Forall, loc);
    t->binders = std::move(binders);
    t->inner = std::move(body);
    return t;
}

TypePtr make_int_type(Loc loc) { return fresh(TypeExpr::Kind::Int, loc); }
TypePtr make_string_type(Loc loc) { return fresh(TypeExpr::Kind::String, loc); }

bool type_equal(const TypePtr& a, const TypePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case TypeExpr::Kind::Int:
    case TypeExpr::Kind::String:
        return true;
    case TypeExpr::Kind::Var:
        return a->name == b->name;
    case TypeExpr::Kind::Singleton:
        if (a->var != kNoVar && b->var != kNoVar) return a->var == b->var;
        if (a->var == kNoVar && b->var == kNoVar) return a->name == b->name;
        return false;
    case TypeExpr::Kind::Nominal: {
        if (a->name != b->name || a->args.size() != b->args.size()) return false;
        for (size_t i = 0; i < a->args.size(); ++i)
            if (!type_equal(a->args[i], b->args[i])) return false;
        return true;
    }
    case TypeExpr::Kind::Tuple: {
        if (a->args.size() != b->args.size()) return false;
        for (size_t i = 0; i < a->args.size(); ++i)
            if (!type_equal(a->args[i], b->args[i])) return false;
        return true;
    }
    case TypeExpr::Kind::Arrow: {
        if (a->params.size() != b->params.size()) return false;
        for (size_t i = 0; i < a->params.size(); ++i) {
            const auto& pa = a->params[i];
            const auto& pb = b->params[i];
            if (pa.binder != pb.binder || pa.consumed != pb.consumed) return false;
            if (!type_equal(pa.type, pb.type)) return false;
        }
        return type_equal(a->ret, b->ret);
    }
    case TypeExpr::Kind::Structural: {
        if (a->name != b->name || a->fields.size() != b->fields.size()) return false;
        for (size_t i = 0; i < a->fields.size(); ++i) {
            if (a->fields[i].name != b->fields[i].name) return false;
            if (!type_equal(a->fields[i].type, b->fields[i].type)) return false;
        }
        return true;
    }
    case TypeExpr::Kind::Bar: {
        if (!type_equal(a->inner, b->inner)) return false;
        if (a->perms.size() != b->perms.size()) return false;
        for (size_t i = 0; i < a->perms.size(); ++i) {
            const auto& pa = a->perms[i];
            const auto& pb = b->perms[i];
            if (pa.subject != kNoVar || pb.subject != kNoVar) {
                if (pa.subject != pb.subject) return false;
            } else if (pa.subject_name != pb.subject_name) {
                return false;
            }
            if (!type_equal(pa.type, pb.type)) return false;
        }
        return true;
    }
    case TypeExpr::Kind::Forall:
        return a->binders == b->binders && type_equal(a->inner, b->inner);
    }
    return false;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    using K = Expr::Kind;
    switch (a->kind) {
    case K::Var:
        return a->name == b->name;
    case K::IntLit:
        return a->int_value == b->int_value;
    case K::StrLit:
        return a->str_value == b->str_value;
    case K::Tuple: {
        if (a->items.size() != b->items.size()) return false;
        for (size_t i = 0; i < a->items.size(); ++i)
            if (!expr_equal(a->items[i], b->items[i])) return false;
        return true;
    }
    case K::Let:
        return a->pattern == b->pattern && expr_equal(a->rhs, b->rhs) &&
               expr_equal(a->body, b->body);
    case K::Match: {
        if (!expr_equal(a->scrutinee, b->scrutinee)) return false;
        if (a->branches.size() != b->branches.size()) return false;
        for (size_t i = 0; i < a->branches.size(); ++i) {
            if (a->branches[i].ctor != b->branches[i].ctor) return false;
            if (!expr_equal(a->branches[i].body, b->branches[i].body)) return false;
        }
        return true;
    }
    case K::If:
        return expr_equal(a->scrutinee, b->scrutinee) &&
               expr_equal(a->then_arm, b->then_arm) &&
               expr_equal(a->else_arm, b->else_arm);
    case K::FieldRead:
        return a->name == b->name && expr_equal(a->object, b->object);
    case K::FieldWrite:
        return a->name == b->name && expr_equal(a->object, b->object) &&
               expr_equal(a->written, b->written);
    case K::Call: {
        if (!expr_equal(a->object, b->object)) return false;
        if (a->items.size() != b->items.size()) return false;
        for (size_t i = 0; i < a->items.size(); ++i)
            if (!expr_equal(a->items[i], b->items[i])) return false;
        if (a->type_args.has_value() != b->type_args.has_value()) return false;
        if (a->type_args) {
            if (a->type_args->size() != b->type_args->size()) return false;
            for (size_t i = 0; i < a->type_args->size(); ++i)
                if (!type_equal((*a->type_args)[i], (*b->type_args)[i])) return false;
        }
        return true;
    }
    case K::CtorAlloc: {
        if (a->name != b->name || a->field_inits.size() != b->field_inits.size())
            return false;
        for (size_t i = 0; i < a->field_inits.size(); ++i) {
            if (a->field_inits[i].first != b->field_inits[i].first) return false;
            if (!expr_equal(a->field_inits[i].second, b->field_inits[i].second))
                return false;
        }
        return true;
    }
    case K::Seq:
        return expr_equal(a->first, b->first) && expr_equal(a->second, b->second);
    }
    return false;
}

namespace {

bool valdef_equal(const ValDef& a, const ValDef& b) {
    if (a.name != b.name || a.typarams != b.typarams) return false;
    if (a.params.has_value() != b.params.has_value()) return false;
    if (a.params) {
        if (a.params->size() != b.params->size()) return false;
        for (size_t i = 0; i < a.params->size(); ++i) {
            const auto& pa = (*a.params)[i];
            const auto& pb = (*b.params)[i];
            if (pa.binder != pb.binder || pa.consumed != pb.consumed) return false;
            if (!type_equal(pa.type, pb.type)) return false;
        }
    }
    if (a.ret || b.ret) {
        if (!type_equal(a.ret, b.ret)) return false;
    }
    return expr_equal(a.body, b.body);
}

} // namespace

bool ast_equal(const Ast& a, const Ast& b) {
    if (a.decls.size() != b.decls.size()) return false;
    for (size_t i = 0; i < a.decls.size(); ++i) {
        const auto& da = a.decls[i];
        const auto& db = b.decls[i];
        if (da.index() != db.index()) return false;
        if (std::holds_alternative<DataDecl>(da)) {
            const auto& xa = std::get<DataDecl>(da);
            const auto& xb = std::get<DataDecl>(db);
            if (xa.name != xb.name || xa.is_mutable != xb.is_mutable ||
                xa.params != xb.params)
                return false;
            if (xa.branches.size() != xb.branches.size()) return false;
            for (size_t j = 0; j < xa.branches.size(); ++j) {
                if (xa.branches[j].ctor != xb.branches[j].ctor) return false;
                if (xa.branches[j].fields.size() != xb.branches[j].fields.size())
                    return false;
                for (size_t k = 0; k < xa.branches[j].fields.size(); ++k) {
                    if (xa.branches[j].fields[k].name != xb.branches[j].fields[k].name)
                        return false;
                    if (!type_equal(xa.branches[j].fields[k].type,
                                    xb.branches[j].fields[k].type))
                        return false;
                }
            }
        } else {
            const auto& ga = std::get<ValGroup>(da);
            const auto& gb = std::get<ValGroup>(db);
            if (ga.is_rec != gb.is_rec || ga.defs.size() != gb.defs.size())
                return false;
            for (size_t j = 0; j < ga.defs.size(); ++j)
                if (!valdef_equal(ga.defs[j], gb.defs[j])) return false;
        }
    }
    return true;
}

} // namespace mezzo
