#include "env_gen.hpp"

#include <cassert>
#include <set>
#include <stdexcept>

namespace mezzo::testgen {

namespace {

DataDecl mtree_decl() {
    DataDecl d;
    d.name = "mtree";
    d.is_mutable = true;
    d.params = {"a"};
    TypePtr rec = make_nominal("mtree", {make_type_var("a")});
    DataBranch null_b;
    null_b.ctor = "Null";
    DataBranch node_b;
    node_b.ctor = "Node";
    node_b.fields = {{"left", rec}, {"value", make_type_var("a")}, {"right", rec}};
    d.branches = {null_b, node_b};
    return d;
}

DataDecl list_decl() {
    DataDecl d;
    d.name = "list";
    d.is_mutable = false;
    d.params = {"a"};
    TypePtr rec = make_nominal("list", {make_type_var("a")});
    DataBranch nil_b;
    nil_b.ctor = "Nil";
    DataBranch cons_b;
    cons_b.ctor = "Cons";
    cons_b.fields = {{"head", make_type_var("a")}, {"tail", rec}};
    d.branches = {nil_b, cons_b};
    return d;
}

DataDecl box_decl() {
    DataDecl d;
    d.name = "box";
    d.is_mutable = true;
    d.params = {"a"};
    DataBranch box_b;
    box_b.ctor = "Box";
    box_b.fields = {{"content", make_type_var("a")}};
    d.branches = {box_b};
    return d;
}

int pick(std::mt19937& rng, int n) {
    return static_cast<int>(rng() % static_cast<unsigned>(n));
}

} // namespace

GenWorld::GenWorld() {
    ast.decls.push_back(mtree_decl());
    ast.decls.push_back(list_decl());
    ast.decls.push_back(box_decl());
    std::vector<Diagnostic> diags;
    ctx = make_context(ast, "<generated>", diags);
    if (!diags.empty()) throw std::logic_error("generator declarations are ill-formed");
    for (int i = 0; i < 6; ++i)
        pool.push_back(vars.fresh("v" + std::to_string(i)));
}

TypePtr random_type(GenWorld& w, std::mt19937& rng, int depth,
                    bool allow_singleton) {
    if (allow_singleton && pick(rng, 6) == 0)
        return make_singleton_var(w.pool[static_cast<size_t>(pick(rng, 6))]);
    if (depth <= 0) return pick(rng, 2) ? make_int_type() : make_string_type();
    switch (pick(rng, 8)) {
    case 0:
        return make_int_type();
    case 1:
        return make_string_type();
    case 2:
    case 3: {
        std::vector<TypePtr> comps;
        int n = 2 + pick(rng, 2);
        for (int i = 0; i < n; ++i)
            comps.push_back(random_type(w, rng, depth - 1, allow_singleton));
        return make_tuple_type(std::move(comps));
    }
    case 4:
        return make_nominal("mtree", {random_type(w, rng, depth - 1, false)});
    case 5:
        return make_nominal("list", {random_type(w, rng, depth - 1, false)});
    case 6:
        return make_nominal("box", {random_type(w, rng, depth - 1, false)});
    default: {
        std::vector<ArrowParam> ps;
        ps.push_back({"", false, random_type(w, rng, 0, false)});
        return make_arrow(std::move(ps), random_type(w, rng, 0, false));
    }
    }
}

PermEnv random_env(GenWorld& w, std::mt19937& rng, int max_atoms) {
    PermEnv env;
    int n = pick(rng, max_atoms + 1);
    std::set<VarId> has_structural;
    for (int i = 0; i < n; ++i) {
        VarId subj = w.pool[static_cast<size_t>(pick(rng, 6))];
        Permission p;
        p.subject = subj;
        if (pick(rng, 3) == 0 && !has_structural.count(subj)) {
            // Structural atom in canonical form: every field is a singleton.
            const DataDecl* d = w.ctx.decl(pick(rng, 3) == 0   ? "box"
                                           : pick(rng, 2) == 0 ? "mtree"
                                                               : "list");
            const DataBranch& b =
                d->branches[static_cast<size_t>(pick(rng, static_cast<int>(d->branches.size())))];
            std::vector<StructField> fs;
            for (const auto& f : b.fields)
                fs.push_back({f.name,
                              make_singleton_var(w.pool[static_cast<size_t>(pick(rng, 6))])});
            p.type = make_structural(b.ctor, std::move(fs));
            has_structural.insert(subj);
            assert(has_structural.count(subj) == 1);
        } else {
            // Top-level singleton atoms become equalities at canonicalization;
            // singleton tuple components stay and exercise the alias rules.
            p.type = random_type(w, rng, 2, true);
        }
        env.atoms_.push_back(std::move(p));
    }
    if (pick(rng, 5) < 2) {
        env.unite(w.pool[static_cast<size_t>(pick(rng, 6))],
                  w.pool[static_cast<size_t>(pick(rng, 6))]);
    }
    return canonicalize(w.ctx, w.vars, std::move(env));
}

SubGoal random_goal(GenWorld& w, std::mt19937& rng) {
    SubGoal g;
    g.subject = w.pool[static_cast<size_t>(pick(rng, 6))];
    g.wanted = random_type(w, rng, 2, true);
    return g;
}

} // namespace mezzo::testgen
