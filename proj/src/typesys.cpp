#include "mezzo/typesys.hpp"

#include "mezzo/printer.hpp"

namespace mezzo {

const DataDecl* TypeContext::decl(const std::string& name) const {
    auto it = table->decls.find(name);
    return it == table->decls.end() ? nullptr : &it->second;
}

const DataDecl* TypeContext::decl_of_ctor(const std::string& ctor, size_t* branch) const {
    auto it = table->ctors.find(ctor);
    if (it == table->ctors.end()) return nullptr;
    if (branch) *branch = it->second.second;
    return decl(it->second.first);
}

namespace {

Diagnostic kind_error(const std::string& file, Loc loc, const std::string& message) {
    Diagnostic d;
    d.file = file;
    d.loc = loc;
    d.code = DiagCode::EKind;
    d.message = message;
    return d;
}

} // namespace

TypeContext make_context(const Ast& ast, const std::string& file,
                         std::vector<Diagnostic>& out) {
    auto table = std::make_shared<DeclTable>();
    for (const auto& decl : ast.decls) {
        const auto* d = std::get_if<DataDecl>(&decl);
        if (!d) continue;
        if (table->decls.count(d->name)) {
            out.push_back(kind_error(file, d->loc, "duplicate data type `" + d->name + "`"));
            continue;
        }
        for (const auto& b : d->branches) {
            if (table->ctors.count(b.ctor)) {
                out.push_back(kind_error(file, b.loc,
                                         "duplicate constructor `" + b.ctor + "`"));
                continue;
            }
            table->ctors[b.ctor] = {d->name, &b - d->branches.data()};
        }
        table->decls[d->name] = *d;
    }
    TypeContext ctx;
    ctx.table = table;

    // Branch field types may only use the declaration's own parameters.
    for (const auto& decl : ast.decls) {
        const auto* d = std::get_if<DataDecl>(&decl);
        if (!d) continue;
        TypeContext local = ctx;
        local.tyvars = {d->params.begin(), d->params.end()};
        for (const auto& b : d->branches)
            for (const auto& f : b.fields) kind_check(local, f.type, {}, file, out);
    }
    return ctx;
}

bool kind_check(const TypeContext& ctx, const TypePtr& t,
                const std::set<std::string>& value_binders, const std::string& file,
                std::vector<Diagnostic>& out) {
    switch (t->kind) {
    case TypeExpr::Kind::Int:
    case TypeExpr::Kind::String:
        return true;
    case TypeExpr::Kind::Var:
        if (!ctx.tyvars.count(t->name)) {
            out.push_back(kind_error(file, t->loc,
                                     "unbound type variable `" + t->name + "`"));
            return false;
        }
        return true;
    case TypeExpr::Kind::Nominal: {
        const DataDecl* d = ctx.decl(t->name);
        if (!d) {
            out.push_back(kind_error(file, t->loc, "unknown type `" + t->name + "`"));
            return false;
        }
        if (d->params.size() != t->args.size()) {
            out.push_back(kind_error(
                file, t->loc, "type `" + t->name + "` expects " +
                                  std::to_string(d->params.size()) + " argument(s), got " +
                                  std::to_string(t->args.size())));
            return false;
        }
        bool ok = true;
        for (const auto& a : t->args) ok &= kind_check(ctx, a, value_binders, file, out);
        return ok;
    }
    case TypeExpr::Kind::Tuple: {
        bool ok = true;
        for (const auto& a : t->args) ok &= kind_check(ctx, a, value_binders, file, out);
        return ok;
    }
    case TypeExpr::Kind::Arrow: {
        std::set<std::string> binders = value_binders;
        for (const auto& p : t->params)
            if (!p.binder.empty()) binders.insert(p.binder);
        bool ok = true;
        for (const auto& p : t->params) ok &= kind_check(ctx, p.type, binders, file, out);
        ok &= kind_check(ctx, t->ret, binders, file, out);
        return ok;
    }
    case TypeExpr::Kind::Structural: {
        size_t branch = 0;
        const DataDecl* d = ctx.decl_of_ctor(t->name, &branch);
        if (!d) {
            out.push_back(kind_error(file, t->loc,
                                     "unknown constructor `" + t->name + "`"));
            return false;
        }
        const auto& declared = d->branches[branch].fields;
        bool ok = true;
        if (t->fields.size() != declared.size()) ok = false;
        for (size_t i = 0; ok && i < declared.size(); ++i)
            if (t->fields[i].name != declared[i].name) ok = false;
        if (!ok) {
            out.push_back(kind_error(file, t->loc,
                                     "constructor `" + t->name +
                                         "` used with the wrong field set"));
            return false;
        }
        for (const auto& f : t->fields)
            ok &= kind_check(ctx, f.type, value_binders, file, out);
        return ok;
    }
    case TypeExpr::Kind::Singleton:
        if (t->var != kNoVar) return true;
        if (!value_binders.count(t->name)) {
            out.push_back(kind_error(file, t->loc,
                                     "singleton type refers to unbound binder `" +
                                         t->name + "`"));
            return false;
        }
        return true;
    case TypeExpr::Kind::Bar: {
        bool ok = kind_check(ctx, t->inner, value_binders, file, out);
        for (const auto& p : t->perms) {
            if (p.subject == kNoVar && !value_binders.count(p.subject_name)) {
                out.push_back(kind_error(file, t->loc,
                                         "permission subject `" + p.subject_name +
                                             "` is not a binder in scope"));
                ok = false;
            }
            ok &= kind_check(ctx, p.type, value_binders, file, out);
        }
        return ok;
    }
    case TypeExpr::Kind::Forall: {
        TypeContext inner = ctx;
        for (const auto& b : t->binders) inner.tyvars.insert(b);
        return kind_check(inner, t->inner, value_binders, file, out);
    }
    }
    return false;
}

const char* mode_name(Mode m) {
    switch (m) {
    case Mode::Duplicable: return "duplicable";
    case Mode::Exclusive: return "exclusive";
    case Mode::Affine: return "affine";
    }
    return "?";
}

Mode tuple_mode_join(Mode a, Mode b) {
    if (a == Mode::Duplicable && b == Mode::Duplicable) return Mode::Duplicable;
    return Mode::Affine;
}

namespace {

Mode mode_of(const TypeContext& ctx, const TypePtr& t, std::set<std::string>& hyp);

Mode fields_mode(const TypeContext& ctx, const std::vector<StructField>& fields,
                 const std::map<std::string, TypePtr>& subst,
                 std::set<std::string>& hyp) {
    Mode m = Mode::Duplicable;
    for (const auto& f : fields) {
        TypePtr ft = subst.empty() ? f.type : substitute_tyvars(f.type, subst);
        m = tuple_mode_join(m, mode_of(ctx, ft, hyp));
    }
    return m;
}

Mode mode_of(const TypeContext& ctx, const TypePtr& t, std::set<std::string>& hyp) {
    switch (t->kind) {
    case TypeExpr::Kind::Int:
    case TypeExpr::Kind::String:
    case TypeExpr::Kind::Arrow:
    case TypeExpr::Kind::Singleton:
        return Mode::Duplicable;
    case TypeExpr::Kind::Var:
        return Mode::Affine;
    case TypeExpr::Kind::Tuple: {
        Mode m = Mode::Duplicable;
        for (const auto& c : t->args) m = tuple_mode_join(m, mode_of(ctx, c, hyp));
        return m;
    }
    case TypeExpr::Kind::Nominal: {
        const DataDecl* d = ctx.decl(t->name);
        if (!d) return Mode::Affine;
        if (d->is_mutable) return Mode::Exclusive;
        std::string key = print_type(t, nullptr);
        if (hyp.count(key)) return Mode::Duplicable;
        hyp.insert(key);
        std::map<std::string, TypePtr> subst;
        for (size_t i = 0; i < d->params.size(); ++i) subst[d->params[i]] = t->args[i];
        Mode m = Mode::Duplicable;
        for (const auto& b : d->branches)
            m = tuple_mode_join(m, fields_mode(ctx, b.fields, subst, hyp));
        hyp.erase(key);
        return m;
    }
    case TypeExpr::Kind::Structural: {
        const DataDecl* d = ctx.decl_of_ctor(t->name);
        if (d && d->is_mutable) return Mode::Exclusive;
        std::map<std::string, TypePtr> empty;
        return fields_mode(ctx, t->fields, empty, hyp);
    }
    case TypeExpr::Kind::Bar: {
        Mode m = mode_of(ctx, t->inner, hyp);
        for (const auto& p : t->perms) m = tuple_mode_join(m, mode_of(ctx, p.type, hyp));
        return m == Mode::Duplicable ? Mode::Duplicable : Mode::Affine;
    }
    case TypeExpr::Kind::Forall:
        return mode_of(ctx, t->inner, hyp);
    }
    return Mode::Affine;
}

} // namespace

Mode infer_mode(const TypeContext& ctx, const TypePtr& t) {
    std::set<std::string> hyp;
    return mode_of(ctx, t, hyp);
}

TypePtr substitute_tyvars(const TypePtr& t, const std::map<std::string, TypePtr>& subst) {
    switch (t->kind) {
    case TypeExpr::Kind::Int:
    case TypeExpr::Kind::String:
    case TypeExpr::Kind::Singleton:
        return t;
    case TypeExpr::Kind::Var: {
        auto it = subst.find(t->name);
        return it == subst.end() ? t : it->second;
    }
    default: {
        auto copy = std::make_shared<TypeExpr>(*t);
        for (auto& a : copy->args) a = substitute_tyvars(a, subst);
        for (auto& p : copy->params) p.type = substitute_tyvars(p.type, subst);
        if (copy->ret) copy->ret = substitute_tyvars(copy->ret, subst);
        for (auto& f : copy->fields) f.type = substitute_tyvars(f.type, subst);
        if (copy->inner) copy->inner = substitute_tyvars(copy->inner, subst);
        for (auto& p : copy->perms) p.type = substitute_tyvars(p.type, subst);
        if (copy->kind == TypeExpr::Kind::Forall) {
            auto narrowed = subst;
            for (const auto& b : copy->binders) narrowed.erase(b);
            if (narrowed.size() != subst.size()) {
                copy = std::make_shared<TypeExpr>(*t);
                for (auto& a : copy->args) a = substitute_tyvars(a, narrowed);
                if (copy->inner) copy->inner = substitute_tyvars(copy->inner, narrowed);
            }
        }
        return copy;
    }
    }
}

TypePtr substitute_binders(const TypePtr& t, const std::map<std::string, VarId>& subst) {
    switch (t->kind) {
    case TypeExpr::Kind::Int:
    case TypeExpr::Kind::String:
    case TypeExpr::Kind::Var:
        return t;
    case TypeExpr::Kind::Singleton: {
        if (t->var != kNoVar) return t;
        auto it = subst.find(t->name);
        if (it == subst.end()) return t;
        auto copy = std::make_shared<TypeExpr>(*t);
        copy->var = it->second;
        return copy;
    }
    default: {
        auto copy = std::make_shared<TypeExpr>(*t);
        for (auto& a : copy->args) a = substitute_binders(a, subst);
        for (auto& p : copy->params) p.type = substitute_binders(p.type, subst);
        if (copy->ret) copy->ret = substitute_binders(copy->ret, subst);
        for (auto& f : copy->fields) f.type = substitute_binders(f.type, subst);
        if (copy->inner) copy->inner = substitute_binders(copy->inner, subst);
        for (auto& p : copy->perms) {
            if (p.subject == kNoVar) {
                auto it = subst.find(p.subject_name);
                if (it != subst.end()) p.subject = it->second;
            }
            p.type = substitute_binders(p.type, subst);
        }
        return copy;
    }
    }
}

} // namespace mezzo
