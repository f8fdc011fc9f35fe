#include "mezzo/perm.hpp"

#include <algorithm>
#include <functional>

#include "mezzo/printer.hpp"

namespace mezzo {

// ---------------------------------------------------------------------------
// VarTable
// ---------------------------------------------------------------------------

VarId VarTable::fresh(const std::string& want) {
    names_.push_back(claim(want.empty() ? "x" : want));
    return static_cast<VarId>(names_.size()) - 1;
}

VarId VarTable::fresh_synthetic() {
    names_.push_back("%" + std::to_string(names_.size()));
    return static_cast<VarId>(names_.size()) - 1;
}

void VarTable::adopt(VarId v, const std::string& want) {
    if (!is_synthetic(v) || want.empty()) return;
    names_[v] = claim(want);
}

void VarTable::push_scope() { scopes_.emplace_back(); }

void VarTable::pop_scope() {
    if (scopes_.size() > 1) scopes_.pop_back();
}

std::string VarTable::claim(const std::string& want) {
    auto& used = scopes_.back();
    std::string name = want;
    for (int i = 1; used.count(name); ++i) name = want + std::to_string(i);
    used.insert(name);
    return name;
}

// ---------------------------------------------------------------------------
// PermEnv equality classes; the canonical representative is the oldest id.
// ---------------------------------------------------------------------------

VarId PermEnv::find(VarId v) const {
    while (true) {
        auto it = parent_.find(v);
        if (it == parent_.end() || it->second == v) return v;
        v = it->second;
    }
}

void PermEnv::unite(VarId a, VarId b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[b] = a;
}

// ---------------------------------------------------------------------------
// Type equality modulo the env's variable equalities
// ---------------------------------------------------------------------------

bool type_equal_in(const PermEnv& env, const TypePtr& a, const TypePtr& b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    using K = TypeExpr::Kind;
    switch (a->kind) {
    case K::Int:
    case K::String:
        return true;
    case K::Var:
        return a->name == b->name;
    case K::Nominal: {
        if (a->name != b->name || a->args.size() != b->args.size()) return false;
        for (size_t i = 0; i < a->args.size(); ++i)
            if (!type_equal_in(env, a->args[i], b->args[i])) return false;
        return true;
    }
    case K::Tuple: {
        if (a->args.size() != b->args.size()) return false;
        for (size_t i = 0; i < a->args.size(); ++i)
            if (!type_equal_in(env, a->args[i], b->args[i])) return false;
        return true;
    }
    case K::Singleton:
        if (a->var != kNoVar && b->var != kNoVar) return env.same(a->var, b->var);
        return a->var == b->var && a->name == b->name;
    case K::Structural: {
        if (a->name != b->name || a->fields.size() != b->fields.size()) return false;
        for (size_t i = 0; i < a->fields.size(); ++i) {
            if (a->fields[i].name != b->fields[i].name) return false;
            if (!type_equal_in(env, a->fields[i].type, b->fields[i].type)) return false;
        }
        return true;
    }
    case K::Arrow: {
        if (a->params.size() != b->params.size()) return false;
        for (size_t i = 0; i < a->params.size(); ++i) {
            if (a->params[i].consumed != b->params[i].consumed) return false;
            if (!type_equal_in(env, a->params[i].type, b->params[i].type)) return false;
        }
        return type_equal_in(env, a->ret, b->ret);
    }
    case K::Bar: {
        if (!type_equal_in(env, a->inner, b->inner)) return false;
        if (a->perms.size() != b->perms.size()) return false;
        for (size_t i = 0; i < a->perms.size(); ++i) {
            const auto& pa = a->perms[i];
            const auto& pb = b->perms[i];
            if (pa.subject != kNoVar && pb.subject != kNoVar) {
                if (!env.same(pa.subject, pb.subject)) return false;
            } else if (pa.subject != pb.subject || pa.subject_name != pb.subject_name) {
                return false;
            }
            if (!type_equal_in(env, pa.type, pb.type)) return false;
        }
        return true;
    }
    case K::Forall:
        return a->binders == b->binders && type_equal_in(env, a->inner, b->inner);
    }
    return false;
}

// ---------------------------------------------------------------------------
// Canonical form
// ---------------------------------------------------------------------------

PermEnv canonicalize(const TypeContext& ctx, VarTable& vars, PermEnv env) {
    using K = TypeExpr::Kind;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& a : env.atoms_) a.subject = env.find(a.subject);

        std::vector<Permission> next;
        next.reserve(env.atoms_.size());
        for (auto& a : env.atoms_) {
            if (a.type->kind == K::Singleton) {
                // x @ =y is exactly the equality x = y.
                if (a.type->var != kNoVar) env.unite(a.subject, a.type->var);
                changed = true;
                continue;
            }
            if (a.type->kind == K::Bar) {
                next.push_back({a.subject, a.type->inner, a.fold_origin});
                for (const auto& pa : a.type->perms) {
                    if (pa.subject == kNoVar) continue; // unresolved binder: no fact
                    next.push_back({pa.subject, pa.type, std::nullopt});
                }
                changed = true;
                continue;
            }
            if (a.type->kind == K::Structural) {
                bool expand = false;
                for (const auto& f : a.type->fields)
                    if (f.type->kind != K::Singleton) { expand = true; break; }
                if (expand) {
                    auto st = std::make_shared<TypeExpr>(*a.type);
                    for (auto& f : st->fields) {
                        if (f.type->kind == K::Singleton) continue;
                        VarId fv = vars.fresh(std::string(1, f.name[0]));
                        next.push_back({fv, f.type, std::nullopt});
                        f.type = make_singleton_var(fv);
                    }
                    next.push_back({a.subject, st, a.fold_origin});
                    changed = true;
                    continue;
                }
            }
            next.push_back(a);
        }
        env.atoms_ = std::move(next);
    }

    // Drop redundant duplicable copies; doubled exclusives poison the env.
    std::vector<char> dead(env.atoms_.size(), 0);
    for (size_t i = 0; i < env.atoms_.size(); ++i) {
        if (dead[i]) continue;
        for (size_t j = i + 1; j < env.atoms_.size(); ++j) {
            if (dead[j] || env.atoms_[j].subject != env.atoms_[i].subject) continue;
            if (type_equal_in(env, env.atoms_[i].type, env.atoms_[j].type) &&
                infer_mode(ctx, env.atoms_[i].type) == Mode::Duplicable)
                dead[j] = 1;
        }
    }
    std::map<VarId, int> exclusive_count;
    std::vector<Permission> kept;
    for (size_t i = 0; i < env.atoms_.size(); ++i) {
        if (dead[i]) continue;
        if (infer_mode(ctx, env.atoms_[i].type) == Mode::Exclusive)
            exclusive_count[env.atoms_[i].subject]++;
        kept.push_back(std::move(env.atoms_[i]));
    }
    for (const auto& [v, n] : exclusive_count)
        if (n >= 2) env.inconsistent = true;
    env.atoms_ = std::move(kept);
    return env;
}

PermEnv add_permission(const TypeContext& ctx, VarTable& vars, PermEnv env,
                       Permission p) {
    env.atoms_.push_back(std::move(p));
    return canonicalize(ctx, vars, std::move(env));
}

// ---------------------------------------------------------------------------
// Subtraction: backtracking proof search with first-solution commitment
// ---------------------------------------------------------------------------

namespace {

/// Rule order, applied to the canonical subject of each goal:
///   (1) an inconsistent env proves anything
///   (2) goals and subjects are chased through equalities
///   (3) singleton goal =y holds iff y is in the subject's class
///   (4) an atom whose type equals the goal is used directly
///   (5) a nominal goal is tried as each of its unfolding branches in
///       declaration order, committing to the first branch that proves
///   (6) a tuple goal decomposes against a tuple atom componentwise
///   (7) a structural goal decomposes against a same-constructor atom
///   (8) a bar goal proves its value type then every side permission
/// Duplicable atoms used by a proof stay; all others are consumed.
struct Prover {
    const TypeContext& ctx;
    /// Live proof attempts. `parent` indexes the frame whose goal spawned
    /// this one; continuation-style search keeps succeeded siblings alive on
    /// the stack, so the ancestor path (not the raw stack) is the chain a
    /// diagnostic should show.
    struct Frame {
        SubGoal g;
        size_t parent;
    };
    static constexpr size_t kRoot = static_cast<size_t>(-1);
    std::vector<Frame> stack;
    std::vector<SubGoal> best;
    long steps = 0;

    using Cont = std::function<std::optional<PermEnv>(PermEnv)>;

    /// Records the root-to-goal path of the frame at `at`; the deepest
    /// path seen first is kept for the eventual diagnostic.
    void note_failure_at(size_t at) {
        std::vector<SubGoal> path;
        for (size_t i = at; i != kRoot; i = stack[i].parent)
            path.push_back(stack[i].g);
        std::reverse(path.begin(), path.end());
        if (path.size() > best.size()) best = std::move(path);
    }

    void note_failure() {
        note_failure_at(stack.empty() ? kRoot : stack.size() - 1);
    }

    std::optional<PermEnv> prove(PermEnv env, VarId x, const TypePtr& t,
                                 size_t parent, const Cont& k) {
        using K = TypeExpr::Kind;
        if (env.inconsistent) return k(env);
        x = env.find(x);
        stack.push_back({{x, t}, parent});
        const size_t self = stack.size() - 1;
        struct Pop {
            std::vector<Frame>& s;
            ~Pop() { s.pop_back(); }
        } pop{stack};

        if (stack.size() > 512 || ++steps > 2000000) {
            note_failure();
            return std::nullopt;
        }

        if (t->kind == K::Singleton) {
            if (t->var != kNoVar && env.find(t->var) == x) return k(env);
            note_failure();
            return std::nullopt;
        }
        if (t->kind == K::Bar) {
            auto r = prove(env, x, t->inner, self,
                           [&](PermEnv e) { return prove_perms(std::move(e), t->perms, 0, self, k); });
            if (!r) note_failure();
            return r;
        }

        // (4) direct atom match, trying atoms in environment order
        for (size_t i = 0; i < env.atoms_.size(); ++i) {
            const Permission& a = env.atoms_[i];
            if (a.subject != x || !type_equal_in(env, a.type, t)) continue;
            PermEnv e2 = env;
            if (infer_mode(ctx, a.type) != Mode::Duplicable)
                e2.atoms_.erase(e2.atoms_.begin() + static_cast<long>(i));
            if (auto r = k(std::move(e2))) return r;
        }

        if (t->kind == K::Nominal) {
            if (const DataDecl* d = ctx.decl(t->name)) {
                std::map<std::string, TypePtr> subst;
                for (size_t i = 0; i < d->params.size() && i < t->args.size(); ++i)
                    subst[d->params[i]] = t->args[i];
                for (const auto& b : d->branches) {
                    std::vector<StructField> fs;
                    fs.reserve(b.fields.size());
                    for (const auto& f : b.fields)
                        fs.push_back({f.name, substitute_tyvars(f.type, subst)});
                    TypePtr goal = make_structural(b.ctor, std::move(fs), t->loc);
                    // Commit to the first branch whose structural proof closes.
                    // The branch form restates this same goal, so it adds no
                    // frame of its own; only its field subgoals do.
                    std::optional<PermEnv> folded = prove_structural(env, x, goal, self,
                        [](PermEnv e) -> std::optional<PermEnv> { return e; });
                    if (folded) return k(std::move(*folded));
                }
            }
            note_failure();
            return std::nullopt;
        }

        if (t->kind == K::Tuple) {
            for (size_t i = 0; i < env.atoms_.size(); ++i) {
                const Permission& a = env.atoms_[i];
                if (a.subject != x || a.type->kind != K::Tuple) continue;
                if (a.type->args.size() != t->args.size()) continue;
                PermEnv e2 = env;
                if (infer_mode(ctx, a.type) != Mode::Duplicable)
                    e2.atoms_.erase(e2.atoms_.begin() + static_cast<long>(i));
                auto r = prove_components(std::move(e2), a.type->args, t->args, 0, self, k);
                if (r) return r;
            }
            note_failure();
            return std::nullopt;
        }

        if (t->kind == K::Structural)
            return prove_structural(std::move(env), x, t, self, k);

        note_failure();
        return std::nullopt;
    }

    /// Matches a structural goal against same-constructor atoms on `x`,
    /// proving field goals componentwise. Pushes no frame for the goal
    /// itself: callers either pushed one already (at `frame`) or are
    /// restating a nominal goal branch by branch.
    std::optional<PermEnv> prove_structural(PermEnv env, VarId x,
                                            const TypePtr& t, size_t frame,
                                            const Cont& k) {
        using K = TypeExpr::Kind;
        for (size_t i = 0; i < env.atoms_.size(); ++i) {
            const Permission& a = env.atoms_[i];
            if (a.subject != x || a.type->kind != K::Structural) continue;
            if (a.type->name != t->name) continue;
            std::vector<TypePtr> have, want;
            bool shape_ok = true;
            for (const auto& gf : t->fields) {
                const StructField* af = nullptr;
                for (const auto& f : a.type->fields)
                    if (f.name == gf.name) { af = &f; break; }
                if (!af) { shape_ok = false; break; }
                have.push_back(af->type);
                want.push_back(gf.type);
            }
            if (!shape_ok) continue;
            PermEnv e2 = env;
            if (infer_mode(ctx, a.type) != Mode::Duplicable)
                e2.atoms_.erase(e2.atoms_.begin() + static_cast<long>(i));
            auto r = prove_components(std::move(e2), have, want, 0, frame, k);
            if (r) return r;
        }
        note_failure_at(frame);
        return std::nullopt;
    }

    /// Conjunction over positional pieces of a tuple or structural atom:
    /// `have[i]` is the atom's component (normally a singleton), `want[i]`
    /// the goal's.
    std::optional<PermEnv> prove_components(PermEnv env,
                                            const std::vector<TypePtr>& have,
                                            const std::vector<TypePtr>& want,
                                            size_t i, size_t parent,
                                            const Cont& k) {
        using K = TypeExpr::Kind;
        if (env.inconsistent) return k(env);
        if (i == have.size()) return k(std::move(env));
        const TypePtr& h = have[i];
        const TypePtr& w = want[i];
        auto rest = [&](PermEnv e) {
            return prove_components(std::move(e), have, want, i + 1, parent, k);
        };
        if (h->kind == K::Singleton && h->var != kNoVar) {
            if (w->kind == K::Singleton) {
                if (w->var != kNoVar && env.same(h->var, w->var)) return rest(std::move(env));
                stack.push_back({{env.find(h->var), w}, parent});
                note_failure();
                stack.pop_back();
                return std::nullopt;
            }
            return prove(std::move(env), h->var, w, parent, rest);
        }
        // Non-singleton component: the atom carries the type inline.
        if (type_equal_in(env, h, w)) return rest(std::move(env));
        note_failure_at(parent);
        return std::nullopt;
    }

    std::optional<PermEnv> prove_perms(PermEnv env,
                                       const std::vector<PermAtomExpr>& perms,
                                       size_t i, size_t parent, const Cont& k) {
        if (i == perms.size()) return k(std::move(env));
        const PermAtomExpr& p = perms[i];
        if (p.subject == kNoVar) {
            note_failure_at(parent);
            return std::nullopt;
        }
        return prove(std::move(env), p.subject, p.type, parent, [&](PermEnv e) {
            return prove_perms(std::move(e), perms, i + 1, parent, k);
        });
    }
};

} // namespace

SubtractResult subtract(const TypeContext& ctx, const PermEnv& env, VarId x,
                        const TypePtr& t) {
    Prover pr{ctx};
    auto r = pr.prove(env, x, t, Prover::kRoot,
                      [](PermEnv e) -> std::optional<PermEnv> { return e; });
    SubtractResult out;
    if (r) {
        out.env = std::move(r);
    } else {
        out.chain = std::move(pr.best);
        if (out.chain.empty()) out.chain.push_back({env.find(x), t});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Refinement
// ---------------------------------------------------------------------------

std::optional<PermEnv> refine_match(const TypeContext& ctx, VarTable& vars,
                                    PermEnv env, VarId x, const std::string& ctor,
                                    const std::string& file, Loc loc) {
    using K = TypeExpr::Kind;
    if (env.inconsistent) return env;
    x = env.find(x);

    size_t branch_idx = 0;
    const DataDecl* ctor_decl = ctx.decl_of_ctor(ctor, &branch_idx);
    if (!ctor_decl) {
        throw CheckError({file, loc, DiagCode::EKind,
                          "unknown constructor " + ctor + " in match pattern"});
    }

    // Already refined: agreement keeps the env, disagreement kills the arm.
    for (const auto& a : env.atoms_) {
        if (a.subject != x || a.type->kind != K::Structural) continue;
        if (a.type->name == ctor) return env;
        if (ctx.decl_of_ctor(a.type->name) == ctor_decl) return std::nullopt;
    }

    for (size_t i = 0; i < env.atoms_.size(); ++i) {
        const Permission& a = env.atoms_[i];
        if (a.subject != x || a.type->kind != K::Nominal) continue;
        if (a.type->name != ctor_decl->name) continue;
        std::map<std::string, TypePtr> subst;
        for (size_t j = 0; j < ctor_decl->params.size() && j < a.type->args.size(); ++j)
            subst[ctor_decl->params[j]] = a.type->args[j];
        const DataBranch& b = ctor_decl->branches[branch_idx];
        std::vector<StructField> fs;
        fs.reserve(b.fields.size());
        for (const auto& f : b.fields)
            fs.push_back({f.name, substitute_tyvars(f.type, subst)});
        Permission refined;
        refined.subject = x;
        refined.type = make_structural(ctor, std::move(fs), loc);
        refined.fold_origin = a.type;
        PermEnv e2 = env;
        e2.atoms_.erase(e2.atoms_.begin() + static_cast<long>(i));
        return add_permission(ctx, vars, std::move(e2), std::move(refined));
    }

    throw CheckError({file, loc, DiagCode::ESubtract,
                      "no permission on " + vars.name(x) +
                          " supports matching constructor " + ctor});
}

// ---------------------------------------------------------------------------
// Field write
// ---------------------------------------------------------------------------

PermEnv check_field_write(const TypeContext& ctx, VarTable& vars, PermEnv env,
                          VarId x, const std::string& field, VarId y,
                          const std::string& file, Loc loc) {
    using K = TypeExpr::Kind;
    if (env.inconsistent) return env;
    x = env.find(x);

    for (auto& a : env.atoms_) {
        if (a.subject != x || a.type->kind != K::Structural) continue;
        const DataDecl* d = ctx.decl_of_ctor(a.type->name);
        if (d && !d->is_mutable) {
            throw CheckError({file, loc, DiagCode::EImmutWrite,
                              "cannot write field " + field + " of immutable " +
                                  a.type->name + " value " + vars.name(x)});
        }
        auto st = std::make_shared<TypeExpr>(*a.type);
        for (auto& f : st->fields) {
            if (f.name != field) continue;
            f.type = make_singleton_var(env.find(y));
            a.type = st;
            return canonicalize(ctx, vars, std::move(env));
        }
        throw CheckError({file, loc, DiagCode::EKind,
                          "constructor " + a.type->name + " has no field " + field});
    }

    throw CheckError({file, loc, DiagCode::ESubtract,
                      "writing " + vars.name(x) + "." + field +
                          " requires a structural permission; match on " +
                          vars.name(x) + " first"});
}

// ---------------------------------------------------------------------------
// Branch merge
// ---------------------------------------------------------------------------

std::optional<PermEnv> try_fold(const TypeContext& ctx, const PermEnv& env,
                                size_t atom_index) {
    const Permission& a = env.atoms_[atom_index];
    if (a.type->kind != TypeExpr::Kind::Structural || !a.fold_origin) return std::nullopt;
    const TypePtr& origin = *a.fold_origin;

    size_t branch_idx = 0;
    const DataDecl* d = ctx.decl_of_ctor(a.type->name, &branch_idx);
    if (!d || d->name != origin->name) return std::nullopt;
    std::map<std::string, TypePtr> subst;
    for (size_t i = 0; i < d->params.size() && i < origin->args.size(); ++i)
        subst[d->params[i]] = origin->args[i];

    PermEnv e = env;
    e.atoms_.erase(e.atoms_.begin() + static_cast<long>(atom_index));
    for (const auto& df : d->branches[branch_idx].fields) {
        const StructField* af = nullptr;
        for (const auto& f : a.type->fields)
            if (f.name == df.name) { af = &f; break; }
        if (!af || af->type->kind != TypeExpr::Kind::Singleton || af->type->var == kNoVar)
            return std::nullopt;
        Prover pr{ctx};
        auto r = pr.prove(e, af->type->var, substitute_tyvars(df.type, subst),
                          Prover::kRoot,
                          [](PermEnv en) -> std::optional<PermEnv> { return en; });
        if (!r) return std::nullopt;
        e = std::move(*r);
    }
    Permission back;
    back.subject = a.subject;
    back.type = origin;
    e.atoms_.push_back(std::move(back));
    return e;
}

static PermEnv fold_normalize(const TypeContext& ctx, PermEnv env) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < env.atoms_.size(); ++i) {
            if (auto folded = try_fold(ctx, env, i)) {
                env = std::move(*folded);
                changed = true;
                break;
            }
        }
    }
    return env;
}

PermEnv merge_branches(const TypeContext& ctx, VarTable& vars,
                       std::vector<PermEnv> envs) {
    (void)vars;
    std::vector<PermEnv> live;
    for (auto& e : envs)
        if (!e.inconsistent) live.push_back(fold_normalize(ctx, std::move(e)));
    if (live.empty()) {
        PermEnv dead;
        dead.inconsistent = true;
        return dead;
    }

    PermEnv out;
    // Equalities common to every branch, over the variables any branch relates.
    std::set<VarId> universe;
    for (const auto& e : live) {
        for (const auto& [v, p] : e.parent_) {
            universe.insert(v);
            universe.insert(p);
        }
    }
    std::vector<VarId> vs(universe.begin(), universe.end());
    for (size_t i = 0; i < vs.size(); ++i) {
        for (size_t j = i + 1; j < vs.size(); ++j) {
            bool all = true;
            for (const auto& e : live)
                if (!e.same(vs[i], vs[j])) { all = false; break; }
            if (all) out.unite(vs[i], vs[j]);
        }
    }

    // Multiset intersection of atoms, keyed by the merged equalities.
    std::vector<std::vector<char>> used(live.size());
    for (size_t b = 1; b < live.size(); ++b)
        used[b].assign(live[b].atoms_.size(), 0);
    for (const auto& a : live[0].atoms_) {
        bool everywhere = true;
        std::vector<size_t> picks;
        for (size_t b = 1; b < live.size(); ++b) {
            bool found = false;
            for (size_t j = 0; j < live[b].atoms_.size(); ++j) {
                if (used[b][j]) continue;
                const Permission& c = live[b].atoms_[j];
                if (out.same(a.subject, c.subject) && type_equal_in(out, a.type, c.type)) {
                    picks.push_back(j);
                    found = true;
                    break;
                }
            }
            if (!found) { everywhere = false; break; }
        }
        if (!everywhere) continue;
        for (size_t b = 1; b < live.size(); ++b) used[b][picks[b - 1]] = 1;
        Permission kept = a;
        kept.subject = out.find(kept.subject);
        out.atoms_.push_back(std::move(kept));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Display
// ---------------------------------------------------------------------------

std::string print_atom(const Permission& p, const VarTable& vars) {
    VarNamer namer = [&vars](VarId v) { return vars.name(v); };
    return vars.name(p.subject) + " @ " + print_type(p.type, &namer);
}

std::string print_goal(VarId subject, const TypePtr& t, const VarTable& vars) {
    VarNamer namer = [&vars](VarId v) { return vars.name(v); };
    return vars.name(subject) + " @ " + print_type(t, &namer);
}

std::string print_env(const PermEnv& env, const VarTable& vars) {
    if (env.inconsistent) return "<inconsistent>";
    std::vector<std::string> parts;
    for (const auto& a : env.atoms_) parts.push_back(print_atom(a, vars));
    for (const auto& [v, p] : env.parent_) {
        VarId r = env.find(v);
        if (r != v) parts.push_back(vars.name(v) + " = " + vars.name(r));
    }
    if (parts.empty()) return "<empty>";
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += " * ";
        out += parts[i];
    }
    return out;
}

} // namespace mezzo
