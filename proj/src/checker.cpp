#include "mezzo/checker.hpp"

#include <algorithm>
#include <set>

#include "mezzo/printer.hpp"

namespace mezzo {

std::vector<FnSignature> prelude_signatures() {
    auto int2int = [] {
        std::vector<ArrowParam> ps{{"", false, make_int_type()},
                                   {"", false, make_int_type()}};
        return ps;
    };
    std::vector<FnSignature> out;
    for (const char* n : {"compare_int", "add_int", "leq_int"})
        out.push_back({n, {}, int2int(), make_int_type()});
    return out;
}

namespace {

using TK = TypeExpr::Kind;
using EK = Expr::Kind;

std::vector<std::string> chain_strings(const std::vector<SubGoal>& chain,
                                       const VarTable& vars) {
    std::vector<std::string> out;
    out.reserve(chain.size());
    for (const auto& g : chain) out.push_back(print_goal(g.subject, g.wanted, vars));
    return out;
}

struct Checker {
    TypeContext base_ctx;
    TypeContext ctx; // base_ctx with the current function's type variables
    std::string file;
    VarTable vars;
    std::map<std::string, FnSignature> fns;
    std::vector<Diagnostic> diags;
    DumpRequest* dump = nullptr;

    using Scope = std::map<std::string, VarId>;
    Scope globals_scope_;
    PermEnv global_full_env_; // threaded through top-level value definitions
    PermEnv global_fn_env_;   // duplicable-only snapshot functions start from

    // ------------------------------------------------------------- helpers

    void probe(const PermEnv& env, const ExprPtr& e) {
        if (dump && !dump->hit && e->loc.line == dump->line) {
            dump->hit = true;
            dump->text = print_env(env, vars);
        }
    }

    VarId lookup(const Scope& scope, const std::string& name, Loc loc) {
        auto it = scope.find(name);
        if (it != scope.end()) return it->second;
        throw CheckError({file, loc, DiagCode::EKind, "unbound variable " + name});
    }

    /// First-order matching of a signature pattern against the types known
    /// for a variable; used for instantiation and allocation origins.
    bool match_against_var(const PermEnv& env, const TypePtr& pat, VarId v,
                           const std::set<std::string>& unknowns,
                           std::map<std::string, TypePtr>& bind) {
        if (pat->kind == TK::Singleton) return true;
        v = env.find(v);
        for (const auto& a : env.atoms_) {
            if (a.subject != v) continue;
            auto trial = bind;
            if (match_type(env, pat, a.type, unknowns, trial)) {
                bind = std::move(trial);
                return true;
            }
            if (pat->kind == TK::Nominal && a.fold_origin) {
                trial = bind;
                if (match_type(env, pat, *a.fold_origin, unknowns, trial)) {
                    bind = std::move(trial);
                    return true;
                }
            }
        }
        return false;
    }

    bool match_type(const PermEnv& env, const TypePtr& pat, const TypePtr& actual,
                    const std::set<std::string>& unknowns,
                    std::map<std::string, TypePtr>& bind) {
        switch (pat->kind) {
        case TK::Var: {
            if (!unknowns.count(pat->name))
                return actual->kind == TK::Var && actual->name == pat->name;
            auto it = bind.find(pat->name);
            if (it != bind.end()) return type_equal_in(env, it->second, actual);
            bind[pat->name] = actual;
            return true;
        }
        case TK::Int:
        case TK::String:
            return actual->kind == pat->kind;
        case TK::Nominal: {
            if (actual->kind != TK::Nominal || actual->name != pat->name) return false;
            if (actual->args.size() != pat->args.size()) return false;
            for (size_t i = 0; i < pat->args.size(); ++i)
                if (!match_component(env, pat->args[i], actual->args[i], unknowns, bind))
                    return false;
            return true;
        }
        case TK::Tuple: {
            if (actual->kind != TK::Tuple || actual->args.size() != pat->args.size())
                return false;
            for (size_t i = 0; i < pat->args.size(); ++i)
                if (!match_component(env, pat->args[i], actual->args[i], unknowns, bind))
                    return false;
            return true;
        }
        case TK::Structural: {
            if (actual->kind != TK::Structural || actual->name != pat->name) return false;
            for (const auto& pf : pat->fields) {
                const StructField* af = nullptr;
                for (const auto& f : actual->fields)
                    if (f.name == pf.name) { af = &f; break; }
                if (!af) return false;
                if (!match_component(env, pf.type, af->type, unknowns, bind)) return false;
            }
            return true;
        }
        case TK::Arrow: {
            if (actual->kind != TK::Arrow || actual->params.size() != pat->params.size())
                return false;
            for (size_t i = 0; i < pat->params.size(); ++i)
                if (!match_type(env, pat->params[i].type, actual->params[i].type,
                                unknowns, bind))
                    return false;
            return match_type(env, pat->ret, actual->ret, unknowns, bind);
        }
        case TK::Bar: {
            const TypePtr& a = actual->kind == TK::Bar ? actual->inner : actual;
            return match_type(env, pat->inner, a, unknowns, bind);
        }
        case TK::Singleton:
        case TK::Forall:
            return true; // no information extracted
        }
        return false;
    }

    /// A pattern component meets either the actual component type directly or,
    /// when the actual is a singleton, any type its target variable holds.
    bool match_component(const PermEnv& env, const TypePtr& pat, const TypePtr& actual,
                         const std::set<std::string>& unknowns,
                         std::map<std::string, TypePtr>& bind) {
        if (pat->kind == TK::Singleton) return true;
        if (actual->kind == TK::Singleton) {
            if (actual->var == kNoVar) return false;
            return match_against_var(env, pat, actual->var, unknowns, bind);
        }
        return match_type(env, pat, actual, unknowns, bind);
    }

    // ------------------------------------------------------------- calls

    FnSignature signature_of_var(const PermEnv& env, VarId v, const std::string& name,
                                 Loc loc) {
        VarId c = env.find(v);
        for (const auto& a : env.atoms_) {
            if (a.subject != c) continue;
            TypePtr t = a.type;
            std::vector<std::string> typarams;
            if (t->kind == TK::Forall) {
                typarams = t->binders;
                t = t->inner;
            }
            if (t->kind != TK::Arrow) continue;
            return {name, typarams, t->params, t->ret};
        }
        throw CheckError({file, loc, DiagCode::ESubtract,
                          name + " holds no arrow permission and cannot be called"});
    }

    std::pair<VarId, PermEnv> check_call(PermEnv env, const FnSignature& sig,
                                         const std::optional<std::vector<TypePtr>>& targs,
                                         const std::vector<VarId>& args, Loc loc) {
        if (args.size() != sig.params.size()) {
            throw CheckError({file, loc, DiagCode::EKind,
                              sig.name + " expects " + std::to_string(sig.params.size()) +
                                  " arguments, got " + std::to_string(args.size())});
        }

        // An inconsistent environment proves every obligation, so the call
        // is vacuous; skip instantiation, which needs live atoms to match.
        if (env.inconsistent) return {vars.fresh_synthetic(), std::move(env)};

        // (a) instantiate universals: explicit arguments or first-order
        // matching against the atoms held for each argument, left to right.
        std::map<std::string, TypePtr> tbind;
        if (!sig.typarams.empty()) {
            if (targs) {
                if (targs->size() != sig.typarams.size()) {
                    throw CheckError({file, loc, DiagCode::EInstantiate,
                                      sig.name + " takes " +
                                          std::to_string(sig.typarams.size()) +
                                          " type arguments, got " +
                                          std::to_string(targs->size())});
                }
                for (size_t i = 0; i < sig.typarams.size(); ++i)
                    tbind[sig.typarams[i]] = (*targs)[i];
            } else {
                std::set<std::string> unknowns(sig.typarams.begin(), sig.typarams.end());
                for (size_t i = 0; i < args.size(); ++i)
                    match_against_var(env, sig.params[i].type, args[i], unknowns, tbind);
                for (const auto& tp : sig.typarams) {
                    if (!tbind.count(tp)) {
                        throw CheckError(
                            {file, loc, DiagCode::EInstantiate,
                             "cannot infer type argument " + tp + " for " + sig.name +
                                 "; supply the type arguments explicitly"});
                    }
                }
            }
        }

        // (b) substitute actual argument variables for binder names.
        std::map<std::string, VarId> bmap;
        for (size_t i = 0; i < args.size(); ++i)
            if (!sig.params[i].binder.empty()) bmap[sig.params[i].binder] = args[i];

        std::vector<TypePtr> ptypes;
        for (const auto& p : sig.params)
            ptypes.push_back(substitute_binders(substitute_tyvars(p.type, tbind), bmap));
        TypePtr rtype = substitute_binders(substitute_tyvars(sig.ret, tbind), bmap);

        // (c) consume each argument at its parameter type.
        for (size_t i = 0; i < args.size(); ++i) {
            SubtractResult res = subtract(ctx, env, args[i], ptypes[i]);
            if (!res.ok()) {
                Diagnostic d{file, loc, DiagCode::ESubtract,
                             "cannot pass argument " + std::to_string(i + 1) + " to " +
                                 sig.name + ": missing " +
                                 print_goal(env.find(args[i]), ptypes[i], vars)};
                d.subgoals = chain_strings(res.chain, vars);
                throw CheckError(std::move(d));
            }
            env = std::move(*res.env);
        }

        // (d) non-consumed parameters flow back to the caller.
        for (size_t i = 0; i < args.size(); ++i)
            if (!sig.params[i].consumed)
                env = add_permission(ctx, vars, std::move(env), {args[i], ptypes[i]});

        // (e) fresh result; canonicalize splits bar types and expands
        // structural returns into named field permissions.
        VarId r = vars.fresh_synthetic();
        env = add_permission(ctx, vars, std::move(env), {r, rtype});
        return {r, env};
    }

    // ------------------------------------------------------------- let

    /// Performs the binding part of a let; mutates scope, returns the env.
    PermEnv bind_let(PermEnv env, Scope& scope, const ExprPtr& e) {
        if (e->pattern.size() == 1) {
            const std::string& name = e->pattern[0];
            VarId v;
            if (e->rhs->kind == EK::Var) {
                // A variable alias is exactly an equality.
                v = lookup(scope, e->rhs->name, e->rhs->loc);
                if (name[0] != '_') {
                    VarId xv = vars.fresh(name);
                    env.unite(xv, v);
                    env = canonicalize(ctx, vars, std::move(env));
                }
            } else {
                auto [rv, env2] = check_expr(std::move(env), scope, e->rhs);
                env = std::move(env2);
                v = rv;
                if (vars.is_synthetic(v)) {
                    if (name[0] != '_') vars.adopt(v, name);
                } else if (name[0] != '_' && vars.name(env.find(v)) != name) {
                    VarId xv = vars.fresh(name);
                    env.unite(xv, v);
                    env = canonicalize(ctx, vars, std::move(env));
                }
            }
            scope[name] = v;
            return env;
        }

        // Tuple destructuring needs a tuple permission of the right arity;
        // non-singleton components are split out on demand.
        auto [rv, env2] = check_expr(std::move(env), scope, e->rhs);
        env = std::move(env2);
        VarId c = env.find(rv);
        if (env.inconsistent) {
            for (const auto& name : e->pattern) scope[name] = vars.fresh(name);
            return env;
        }
        for (size_t i = 0; i < env.atoms_.size(); ++i) {
            const Permission& a = env.atoms_[i];
            if (a.subject != c || a.type->kind != TK::Tuple) continue;
            if (a.type->args.size() != e->pattern.size()) continue;
            auto tt = std::make_shared<TypeExpr>(*a.type);
            for (size_t j = 0; j < tt->args.size(); ++j) {
                if (tt->args[j]->kind == TK::Singleton) continue;
                VarId fv = vars.fresh(e->pattern[j]);
                env.atoms_.push_back({fv, tt->args[j], std::nullopt});
                tt->args[j] = make_singleton_var(fv);
            }
            env.atoms_[i].type = tt;
            for (size_t j = 0; j < e->pattern.size(); ++j) {
                VarId tv = tt->args[j]->var;
                const std::string& name = e->pattern[j];
                if (name[0] == '_') { scope[name] = tv; continue; }
                if (vars.is_synthetic(tv)) {
                    vars.adopt(tv, name);
                } else if (vars.name(env.find(tv)) != name) {
                    VarId xv = vars.fresh(name);
                    env.unite(xv, tv);
                }
                scope[name] = tv;
            }
            return canonicalize(ctx, vars, std::move(env));
        }
        throw CheckError({file, e->loc, DiagCode::ESubtract,
                          "destructuring needs a " + std::to_string(e->pattern.size()) +
                              "-tuple permission on " + vars.name(c)});
    }

    // ------------------------------------------------------------- exprs

    std::pair<VarId, PermEnv> check_expr(PermEnv env, Scope scope, const ExprPtr& e) {
        probe(env, e);
        switch (e->kind) {
        case EK::Var:
            return {lookup(scope, e->name, e->loc), std::move(env)};

        case EK::IntLit: {
            VarId v = vars.fresh_synthetic();
            env = add_permission(ctx, vars, std::move(env), {v, make_int_type()});
            return {v, env};
        }
        case EK::StrLit: {
            VarId v = vars.fresh_synthetic();
            env = add_permission(ctx, vars, std::move(env), {v, make_string_type()});
            return {v, env};
        }
        case EK::Tuple: {
            std::vector<TypePtr> comps;
            for (const auto& item : e->items) {
                auto [cv, env2] = check_expr(std::move(env), scope, item);
                env = std::move(env2);
                comps.push_back(make_singleton_var(cv));
            }
            VarId v = vars.fresh_synthetic();
            env = add_permission(ctx, vars, std::move(env),
                                 {v, make_tuple_type(std::move(comps), e->loc)});
            return {v, env};
        }
        case EK::Let: {
            env = bind_let(std::move(env), scope, e);
            return check_expr(std::move(env), scope, e->body);
        }
        case EK::Seq: {
            auto [fv, env2] = check_expr(std::move(env), scope, e->first);
            (void)fv;
            return check_expr(std::move(env2), scope, e->second);
        }
        case EK::If: {
            auto [cv, env2] = check_expr(std::move(env), scope, e->scrutinee);
            env = require(std::move(env2), cv, make_int_type(), e->scrutinee->loc,
                          "the condition of if");
            VarId jv = vars.fresh_synthetic();
            std::vector<PermEnv> outs;
            for (const ExprPtr& arm : {e->then_arm, e->else_arm}) {
                auto [av, ae] = check_expr(env, scope, arm);
                ae.unite(jv, av);
                outs.push_back(canonicalize(ctx, vars, std::move(ae)));
            }
            return {jv, merge_branches(ctx, vars, std::move(outs))};
        }
        case EK::Match: {
            auto [sv, env2] = check_expr(std::move(env), scope, e->scrutinee);
            env = std::move(env2);
            VarId jv = vars.fresh_synthetic();
            std::vector<PermEnv> outs;
            for (const auto& br : e->branches) {
                auto refined = refine_match(ctx, vars, env, sv, br.ctor, file, br.loc);
                if (!refined) {
                    diags.push_back({file, br.loc, DiagCode::WDeadcode,
                                     "match branch " + br.ctor + " is unreachable"});
                    continue;
                }
                auto [bv, be] = check_expr(std::move(*refined), scope, br.body);
                be.unite(jv, bv);
                outs.push_back(canonicalize(ctx, vars, std::move(be)));
            }
            PermEnv merged = merge_branches(ctx, vars, std::move(outs));
            if (merged.inconsistent && !env.inconsistent) {
                diags.push_back({file, e->loc, DiagCode::WDeadcode,
                                 "no branch of this match is reachable; the "
                                 "continuation is dead code"});
            }
            return {jv, merged};
        }
        case EK::FieldRead: {
            auto [ov, env2] = check_expr(std::move(env), scope, e->object);
            env = std::move(env2);
            VarId o = env.find(ov);
            if (env.inconsistent) return {vars.fresh_synthetic(), std::move(env)};
            for (const auto& a : env.atoms_) {
                if (a.subject != o || a.type->kind != TK::Structural) continue;
                for (const auto& f : a.type->fields) {
                    if (f.name != e->name) continue;
                    if (f.type->kind == TK::Singleton && f.type->var != kNoVar)
                        return {f.type->var, std::move(env)};
                }
                throw CheckError({file, e->loc, DiagCode::EKind,
                                  "constructor " + a.type->name + " has no field " +
                                      e->name});
            }
            throw CheckError({file, e->loc, DiagCode::ESubtract,
                              "reading " + vars.name(o) + "." + e->name +
                                  " requires a structural permission; match on " +
                                  vars.name(o) + " first"});
        }
        case EK::FieldWrite: {
            auto [ov, env2] = check_expr(std::move(env), scope, e->object);
            env = std::move(env2);
            VarId wv = lookup(scope, e->written->name, e->written->loc);
            env = check_field_write(ctx, vars, std::move(env), ov, e->name, wv, file,
                                    e->loc);
            // A write is a statement; its value carries no permissions.
            return {vars.fresh_synthetic(), std::move(env)};
        }
        case EK::CtorAlloc:
            return check_alloc(std::move(env), scope, e);
        case EK::Call: {
            std::vector<VarId> args;
            for (const auto& item : e->items) {
                auto [av, env2] = check_expr(std::move(env), scope, item);
                env = std::move(env2);
                args.push_back(av);
            }
            FnSignature sig;
            if (e->object->kind == EK::Var) {
                const std::string& name = e->object->name;
                auto sit = scope.find(name);
                if (sit != scope.end()) {
                    sig = signature_of_var(env, sit->second, name, e->object->loc);
                } else {
                    auto fit = fns.find(name);
                    if (fit == fns.end()) {
                        throw CheckError({file, e->object->loc, DiagCode::EKind,
                                          "unbound function " + name});
                    }
                    sig = fit->second;
                }
            } else {
                auto [fv, env2] = check_expr(std::move(env), scope, e->object);
                env = std::move(env2);
                sig = signature_of_var(env, fv, "the callee", e->object->loc);
            }
            return check_call(std::move(env), sig, e->type_args, args, e->loc);
        }
        }
        throw CheckError({file, e->loc, DiagCode::EKind, "unsupported expression"});
    }

    std::pair<VarId, PermEnv> check_alloc(PermEnv env, Scope& scope, const ExprPtr& e) {
        size_t branch_idx = 0;
        const DataDecl* d = ctx.decl_of_ctor(e->name, &branch_idx);
        if (!d) {
            throw CheckError(
                {file, e->loc, DiagCode::EKind, "unknown constructor " + e->name});
        }
        const DataBranch& b = d->branches[branch_idx];

        std::map<std::string, VarId> given;
        for (const auto& [fname, fexpr] : e->field_inits) {
            auto [fv, env2] = check_expr(std::move(env), scope, fexpr);
            env = std::move(env2);
            if (!given.emplace(fname, fv).second) {
                throw CheckError({file, e->loc, DiagCode::EKind,
                                  "field " + fname + " initialized twice"});
            }
        }
        for (const auto& f : b.fields) {
            if (!given.count(f.name)) {
                throw CheckError({file, e->loc, DiagCode::EKind,
                                  "constructor " + e->name + " needs field " + f.name});
            }
        }
        if (given.size() != b.fields.size()) {
            throw CheckError({file, e->loc, DiagCode::EKind,
                              "constructor " + e->name + " takes " +
                                  std::to_string(b.fields.size()) + " fields"});
        }

        std::vector<StructField> fields;
        fields.reserve(b.fields.size());
        for (const auto& f : b.fields)
            fields.push_back({f.name, make_singleton_var(given[f.name])});

        // Allocation origin: recover the nominal arguments from what the
        // field values are known to be, when every parameter is determined.
        std::optional<TypePtr> origin;
        std::set<std::string> unknowns(d->params.begin(), d->params.end());
        std::map<std::string, TypePtr> bind;
        for (const auto& f : b.fields)
            match_against_var(env, f.type, given[f.name], unknowns, bind);
        if (bind.size() == d->params.size()) {
            std::vector<TypePtr> targs;
            for (const auto& p : d->params) targs.push_back(bind[p]);
            origin = make_nominal(d->name, std::move(targs), e->loc);
        }

        Permission p;
        p.subject = vars.fresh_synthetic();
        p.type = make_structural(e->name, std::move(fields), e->loc);
        p.fold_origin = origin;
        VarId v = p.subject;
        env = add_permission(ctx, vars, std::move(env), std::move(p));
        return {v, env};
    }

    PermEnv require(PermEnv env, VarId v, const TypePtr& t, Loc loc,
                    const std::string& what) {
        SubtractResult res = subtract(ctx, env, v, t);
        if (!res.ok()) {
            Diagnostic d{file, loc, DiagCode::ESubtract,
                         what + " needs " + print_goal(env.find(v), t, vars)};
            d.subgoals = chain_strings(res.chain, vars);
            throw CheckError(std::move(d));
        }
        return std::move(*res.env);
    }

    // ------------------------------------------------------------- returns

    struct ReturnSpec {
        TypePtr type;
        std::vector<std::pair<VarId, TypePtr>> givebacks;
        std::string fn_name;
    };

    /// Walks the branching structure so every execution path discharges the
    /// return obligations from its own environment.
    void check_tail(PermEnv env, Scope scope, const ExprPtr& e, const ReturnSpec& ret) {
        probe(env, e);
        switch (e->kind) {
        case EK::Let: {
            env = bind_let(std::move(env), scope, e);
            check_tail(std::move(env), scope, e->body, ret);
            return;
        }
        case EK::Seq: {
            auto [fv, env2] = check_expr(std::move(env), scope, e->first);
            (void)fv;
            check_tail(std::move(env2), scope, e->second, ret);
            return;
        }
        case EK::If: {
            auto [cv, env2] = check_expr(std::move(env), scope, e->scrutinee);
            env = require(std::move(env2), cv, make_int_type(), e->scrutinee->loc,
                          "the condition of if");
            check_tail(env, scope, e->then_arm, ret);
            check_tail(std::move(env), scope, e->else_arm, ret);
            return;
        }
        case EK::Match: {
            auto [sv, env2] = check_expr(std::move(env), scope, e->scrutinee);
            env = std::move(env2);
            bool any_live = false;
            for (const auto& br : e->branches) {
                auto refined = refine_match(ctx, vars, env, sv, br.ctor, file, br.loc);
                if (!refined) {
                    diags.push_back({file, br.loc, DiagCode::WDeadcode,
                                     "match branch " + br.ctor + " is unreachable"});
                    continue;
                }
                any_live = true;
                check_tail(std::move(*refined), scope, br.body, ret);
            }
            if (!any_live && !env.inconsistent) {
                diags.push_back({file, e->loc, DiagCode::WDeadcode,
                                 "no branch of this match is reachable; the "
                                 "continuation is dead code"});
            }
            return;
        }
        default: {
            auto [v, env2] = check_expr(std::move(env), scope, e);
            discharge(std::move(env2), v, e->loc, ret);
            return;
        }
        }
    }

    void discharge(PermEnv env, VarId v, Loc loc, const ReturnSpec& ret) {
        std::vector<std::pair<VarId, TypePtr>> goals;
        goals.emplace_back(v, ret.type);
        for (const auto& g : ret.givebacks) goals.push_back(g);
        for (const auto& [subj, ty] : goals) {
            SubtractResult res = subtract(ctx, env, subj, ty);
            if (!res.ok()) {
                std::string missing = res.chain.empty()
                                          ? print_goal(env.find(subj), ty, vars)
                                          : print_goal(res.chain.back().subject,
                                                       res.chain.back().wanted, vars);
                Diagnostic d{file, loc, DiagCode::EReturn,
                             "cannot return from " + ret.fn_name + ": missing " +
                                 missing};
                d.subgoals = chain_strings(res.chain, vars);
                diags.push_back(std::move(d));
                return; // one return error per failing path
            }
            env = std::move(*res.env);
        }
    }

    // ------------------------------------------------------------- top level

    void register_fn(const ValDef& def) {
        FnSignature sig{def.name, def.typarams, *def.params, def.ret};
        fns[def.name] = sig;
        // Functions are also first-class duplicable values.
        TypePtr arrow = make_arrow(sig.params, sig.ret, def.loc);
        TypePtr full = sig.typarams.empty()
                           ? arrow
                           : make_forall(sig.typarams, std::move(arrow), def.loc);
        VarId fv = vars.fresh(def.name);
        globals_scope_[def.name] = fv;
        global_fn_env_ =
            add_permission(base_ctx, vars, std::move(global_fn_env_), {fv, full});
        global_full_env_ =
            add_permission(base_ctx, vars, std::move(global_full_env_), {fv, full});
    }

    void check_function(const ValDef& def) {
        ctx = base_ctx;
        ctx.tyvars = std::set<std::string>(def.typarams.begin(), def.typarams.end());

        std::set<std::string> binders;
        for (const auto& p : *def.params)
            if (!p.binder.empty()) binders.insert(p.binder);
        bool sig_ok = true;
        for (const auto& p : *def.params)
            sig_ok &= kind_check(ctx, p.type, binders, file, diags);
        sig_ok &= kind_check(ctx, def.ret, binders, file, diags);
        if (!sig_ok) return;

        vars.push_scope();
        Scope scope = globals_scope_;
        PermEnv env = global_fn_env_;

        std::map<std::string, VarId> bmap;
        std::vector<VarId> pvars;
        for (const auto& p : *def.params) {
            VarId v = vars.fresh(p.binder.empty() ? "arg" : p.binder);
            pvars.push_back(v);
            if (!p.binder.empty()) {
                scope[p.binder] = v;
                bmap[p.binder] = v;
            }
        }

        ReturnSpec ret;
        ret.fn_name = def.name;
        ret.type = substitute_binders(def.ret, bmap);
        for (size_t i = 0; i < def.params->size(); ++i) {
            TypePtr pt = substitute_binders((*def.params)[i].type, bmap);
            env = add_permission(ctx, vars, std::move(env), {pvars[i], pt});
            if (!(*def.params)[i].consumed) ret.givebacks.emplace_back(pvars[i], pt);
        }

        // A signature can hypothesize a conjunction no caller can realize,
        // e.g. two exclusive permissions for one variable; the whole body is
        // then dead and every obligation holds vacuously.
        if (env.inconsistent) {
            diags.push_back({file, def.body->loc, DiagCode::WDeadcode,
                             "the permissions assumed by " + def.name +
                                 " are inconsistent; its body is dead code"});
        }

        try {
            check_tail(std::move(env), std::move(scope), def.body, ret);
        } catch (const CheckError& ce) {
            diags.push_back(ce.diag);
        }
        vars.pop_scope();
    }

    void check_global_value(const ValDef& def) {
        ctx = base_ctx;
        try {
            auto [v, env2] = check_expr(global_full_env_, globals_scope_, def.body);
            if (vars.is_synthetic(v)) vars.adopt(v, def.name);
            globals_scope_[def.name] = v;
            global_full_env_ = std::move(env2);
            global_fn_env_ = duplicable_only(global_full_env_);
        } catch (const CheckError& ce) {
            diags.push_back(ce.diag);
        }
    }

    /// Functions must not observe affine or exclusive top-level atoms: each
    /// function body starts from its own copy of the env, and two bodies
    /// sharing one non-duplicable atom would both claim it.
    PermEnv duplicable_only(const PermEnv& env) const {
        PermEnv out;
        out.parent_ = env.parent_;
        out.inconsistent = env.inconsistent;
        for (const auto& a : env.atoms_)
            if (infer_mode(base_ctx, a.type) == Mode::Duplicable) out.atoms_.push_back(a);
        return out;
    }

    CheckResult run(const Ast& ast) {
        base_ctx = make_context(ast, file, diags);
        ctx = base_ctx;
        for (const auto& sig : prelude_signatures()) {
            fns[sig.name] = sig;
            TypePtr arrow = make_arrow(sig.params, sig.ret);
            VarId fv = vars.fresh(sig.name);
            globals_scope_[sig.name] = fv;
            global_fn_env_ =
                add_permission(base_ctx, vars, std::move(global_fn_env_), {fv, arrow});
            global_full_env_ = add_permission(base_ctx, vars,
                                              std::move(global_full_env_), {fv, arrow});
        }

        for (const auto& decl : ast.decls) {
            const ValGroup* g = std::get_if<ValGroup>(&decl);
            if (!g) continue;
            if (g->is_rec) {
                for (const auto& def : g->defs)
                    if (def.is_function()) register_fn(def);
            }
            for (const auto& def : g->defs) {
                if (def.is_function()) {
                    check_function(def);
                    if (!g->is_rec) register_fn(def);
                } else {
                    check_global_value(def);
                }
            }
        }

        CheckResult out;
        out.diagnostics = std::move(diags);
        out.ok = std::none_of(out.diagnostics.begin(), out.diagnostics.end(),
                              [](const Diagnostic& d) { return diag_is_error(d.code); });
        return out;
    }
};

} // namespace

CheckResult check_program(const Ast& ast, const std::string& file, DumpRequest* dump) {
    Checker c;
    c.file = file;
    c.dump = dump;
    return c.run(ast);
}

} // namespace mezzo
