#include "mezzo/printer.hpp"

#include <sstream>

namespace mezzo {

namespace {

std::string singleton_name(const TypeExpr& t, const VarNamer* namer) {
    if (t.var != kNoVar && namer) return (*namer)(t.var);
    return t.name;
}

std::string type_str(const TypePtr& t, const VarNamer* namer);

/// Types in argument position of a nominal application must be atomic.
std::string type_atom_str(const TypePtr& t, const VarNamer* namer) {
    switch (t->kind) {
    case TypeExpr::Kind::Int:
    case TypeExpr::Kind::String:
    case TypeExpr::Kind::Var:
    case TypeExpr::Kind::Tuple:
    case TypeExpr::Kind::Bar:
        return type_str(t, namer);
    case TypeExpr::Kind::Nominal:
        if (t->args.empty()) return type_str(t, namer);
        return "(" + type_str(t, namer) + ")";
    default:
        // Singleton and structural forms are not identifier-led, so they
        // parse in argument position only when parenthesized.
        return "(" + type_str(t, namer) + ")";
    }
}

std::string param_str(const ArrowParam& p, const VarNamer* namer) {
    std::string out;
    if (p.consumed) out += "consumes ";
    if (!p.binder.empty()) out += p.binder + ": ";
    out += type_str(p.type, namer);
    return out;
}

std::string type_str(const TypePtr& t, const VarNamer* namer) {
    std::ostringstream out;
    switch (t->kind) {
    case TypeExpr::Kind::Int:
        return "int";
    case TypeExpr::Kind::String:
        return "string";
    case TypeExpr::Kind::Var:
        return t->name;
    case TypeExpr::Kind::Singleton:
        return "=" + singleton_name(*t, namer);
    case TypeExpr::Kind::Nominal: {
        out << t->name;
        for (const auto& a : t->args) out << " " << type_atom_str(a, namer);
        return out.str();
    }
    case TypeExpr::Kind::Tuple: {
        out << "(";
        for (size_t i = 0; i < t->args.size(); ++i) {
            if (i) out << ", ";
            out << type_str(t->args[i], namer);
        }
        out << ")";
        return out.str();
    }
    case TypeExpr::Kind::Arrow: {
        out << "(";
        for (size_t i = 0; i < t->params.size(); ++i) {
            if (i) out << ", ";
            out << param_str(t->params[i], namer);
        }
        out << ") -> " << type_str(t->ret, namer);
        return out.str();
    }
    case TypeExpr::Kind::Structural: {
        out << t->name;
        if (!t->fields.empty()) {
            out << " { ";
            for (size_t i = 0; i < t->fields.size(); ++i) {
                if (i) out << "; ";
                out << t->fields[i].name << ": " << type_str(t->fields[i].type, namer);
            }
            out << " }";
        }
        return out.str();
    }
    case TypeExpr::Kind::Bar: {
        out << "(" << type_str(t->inner, namer) << " | ";
        for (size_t i = 0; i < t->perms.size(); ++i) {
            if (i) out << " * ";
            const auto& p = t->perms[i];
            std::string subj = (p.subject != kNoVar && namer) ? (*namer)(p.subject)
                                                              : p.subject_name;
            out << subj << " @ " << type_str(p.type, namer);
        }
        out << ")";
        return out.str();
    }
    case TypeExpr::Kind::Forall: {
        out << "[";
        for (size_t i = 0; i < t->binders.size(); ++i) {
            if (i) out << ", ";
            out << t->binders[i];
        }
        out << "] " << type_str(t->inner, namer);
        return out.str();
    }
    }
    return "?";
}

std::string expr_str(const ExprPtr& e);

/// Expressions in call-argument, tuple-component, field-value, or similar
/// atomic positions; anything that is not already atomic gets parenthesized.
std::string expr_atom_str(const ExprPtr& e) {
    switch (e->kind) {
    case Expr::Kind::Var:
    case Expr::Kind::IntLit:
    case Expr::Kind::StrLit:
    case Expr::Kind::Tuple:
    case Expr::Kind::FieldRead:
    case Expr::Kind::Call:
    case Expr::Kind::CtorAlloc:
        return expr_str(e);
    default:
        return "(" + expr_str(e) + ")";
    }
}

std::string escape_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        default: out += c;
        }
    }
    out += "\"";
    return out;
}

std::string expr_str(const ExprPtr& e) {
    std::ostringstream out;
    switch (e->kind) {
    case Expr::Kind::Var:
        return e->name;
    case Expr::Kind::IntLit:
        return std::to_string(e->int_value);
    case Expr::Kind::StrLit:
        return escape_string(e->str_value);
    case Expr::Kind::Tuple: {
        out << "(";
        for (size_t i = 0; i < e->items.size(); ++i) {
            if (i) out << ", ";
            out << expr_atom_str(e->items[i]);
        }
        out << ")";
        return out.str();
    }
    case Expr::Kind::Let: {
        out << "let ";
        for (size_t i = 0; i < e->pattern.size(); ++i) {
            if (i) out << ", ";
            out << e->pattern[i];
        }
        out << " = " << expr_str(e->rhs) << " in " << expr_str(e->body);
        return out.str();
    }
    case Expr::Kind::Match: {
        out << "match " << expr_str(e->scrutinee) << " with";
        for (const auto& b : e->branches)
            out << " | " << b.ctor << " -> " << expr_str(b.body);
        out << " end";
        return out.str();
    }
    case Expr::Kind::If:
        out << "if " << expr_str(e->scrutinee) << " then " << expr_str(e->then_arm)
            << " else " << expr_str(e->else_arm);
        return out.str();
    case Expr::Kind::FieldRead:
        return expr_atom_str(e->object) + "." + e->name;
    case Expr::Kind::FieldWrite:
        return expr_atom_str(e->object) + "." + e->name + " <- " +
               expr_atom_str(e->written);
    case Expr::Kind::Call: {
        out << expr_atom_str(e->object);
        if (e->type_args) {
            out << " [";
            for (size_t i = 0; i < e->type_args->size(); ++i) {
                if (i) out << ", ";
                out << type_str((*e->type_args)[i], nullptr);
            }
            out << "]";
        }
        out << " (";
        for (size_t i = 0; i < e->items.size(); ++i) {
            if (i) out << ", ";
            out << expr_atom_str(e->items[i]);
        }
        out << ")";
        return out.str();
    }
    case Expr::Kind::CtorAlloc: {
        out << e->name;
        if (!e->field_inits.empty()) {
            out << " { ";
            for (size_t i = 0; i < e->field_inits.size(); ++i) {
                if (i) out << "; ";
                out << e->field_inits[i].first << " = "
                    << expr_atom_str(e->field_inits[i].second);
            }
            out << " }";
        }
        return out.str();
    }
    case Expr::Kind::Seq: {
        // A trailing form in head position would swallow the continuation.
        bool guard = e->first->kind == Expr::Kind::Let ||
                     e->first->kind == Expr::Kind::If ||
                     e->first->kind == Expr::Kind::Match ||
                     e->first->kind == Expr::Kind::Seq;
        if (guard)
            out << "begin " << expr_str(e->first) << " end";
        else
            out << expr_str(e->first);
        out << "; " << expr_str(e->second);
        return out.str();
    }
    }
    return "?";
}

void print_valdef(std::ostringstream& out, const ValDef& d) {
    out << d.name;
    if (!d.typarams.empty()) {
        out << " [";
        for (size_t i = 0; i < d.typarams.size(); ++i) {
            if (i) out << ", ";
            out << d.typarams[i];
        }
        out << "]";
    }
    if (d.params) {
        out << " (";
        for (size_t i = 0; i < d.params->size(); ++i) {
            if (i) out << ", ";
            out << param_str((*d.params)[i], nullptr);
        }
        out << ")";
    }
    if (d.ret) out << " : " << type_str(d.ret, nullptr);
    out << " =\n  " << expr_str(d.body) << "\n";
}

} // namespace

std::string print_type(const TypePtr& t, const VarNamer* namer) {
    return type_str(t, namer);
}

std::string print_expr(const ExprPtr& e) { return expr_str(e); }

std::string print_program(const Ast& ast) {
    std::ostringstream out;
    for (const auto& decl : ast.decls) {
        if (const auto* d = std::get_if<DataDecl>(&decl)) {
            out << "data ";
            if (d->is_mutable) out << "mutable ";
            out << d->name;
            for (const auto& p : d->params) out << " " << p;
            out << " =\n";
            for (const auto& b : d->branches) {
                out << "  | " << b.ctor;
                if (!b.fields.empty()) {
                    out << " { ";
                    for (size_t i = 0; i < b.fields.size(); ++i) {
                        if (i) out << "; ";
                        out << b.fields[i].name << ": "
                            << type_str(b.fields[i].type, nullptr);
                    }
                    out << " }";
                }
                out << "\n";
            }
            out << "\n";
        } else {
            const auto& g = std::get<ValGroup>(decl);
            for (size_t i = 0; i < g.defs.size(); ++i) {
                if (i == 0)
                    out << (g.is_rec ? "val rec " : "val ");
                else
                    out << "and ";
                print_valdef(out, g.defs[i]);
            }
            out << "\n";
        }
    }
    return out.str();
}

} // namespace mezzo
