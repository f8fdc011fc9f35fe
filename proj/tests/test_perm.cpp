#include "doctest.h"

#include <string>

#include "env_gen.hpp"
#include "mezzo/perm.hpp"

using namespace mezzo;
using testgen::GenWorld;

namespace {

TypePtr mtree_int() { return make_nominal("mtree", {make_int_type()}); }
TypePtr list_int() { return make_nominal("list", {make_int_type()}); }

const Permission* structural_on(const PermEnv& env, VarId x) {
    VarId c = env.find(x);
    for (const auto& p : env.atoms_)
        if (env.find(p.subject) == c && p.type->kind == TypeExpr::Kind::Structural)
            return &p;
    return nullptr;
}

VarId field_var(const Permission& p, const std::string& field) {
    for (const auto& f : p.type->fields)
        if (f.name == field) {
            REQUIRE(f.type->kind == TypeExpr::Kind::Singleton);
            REQUIRE(f.type->var != kNoVar);
            return f.type->var;
        }
    FAIL("no field " << field << " on " << p.type->name);
    return kNoVar;
}

size_t atoms_on(const PermEnv& env, VarId x) {
    size_t n = 0;
    for (const auto& p : env.atoms_)
        if (env.find(p.subject) == env.find(x)) ++n;
    return n;
}

} // namespace

TEST_CASE("singleton permissions become equalities") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    VarId y = w.vars.fresh("y");
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, make_singleton_var(y), {}});
    CHECK(env.same(x, y));
    CHECK(env.atoms_.empty());
    CHECK(!env.inconsistent);
}

TEST_CASE("two exclusive permissions on one variable are inconsistent") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, mtree_int(), {}});
    CHECK(!env.inconsistent);
    env = add_permission(w.ctx, w.vars, env, {x, mtree_int(), {}});
    CHECK(env.inconsistent);
}

TEST_CASE("uniting two exclusive holders is detected on canonicalization") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    VarId y = w.vars.fresh("y");
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, mtree_int(), {}});
    env = add_permission(w.ctx, w.vars, env, {y, mtree_int(), {}});
    CHECK(!env.inconsistent);
    env.unite(x, y);
    env = canonicalize(w.ctx, w.vars, std::move(env));
    CHECK(env.inconsistent);
}

TEST_CASE("duplicable permissions never pile up") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, list_int(), {}});
    env = add_permission(w.ctx, w.vars, env, {x, list_int(), {}});
    CHECK(!env.inconsistent);
    CHECK(atoms_on(env, x) == 1);
}

TEST_CASE("structural permissions expand to singleton fields plus field atoms") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    TypePtr raw = make_structural("Node", {{"left", mtree_int()},
                                           {"value", make_int_type()},
                                           {"right", mtree_int()}});
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, raw, {}});
    const Permission* s = structural_on(env, x);
    REQUIRE(s != nullptr);
    VarId l = field_var(*s, "left");
    VarId v = field_var(*s, "value");
    VarId r = field_var(*s, "right");
    CHECK(subtract(w.ctx, env, l, mtree_int()).ok());
    CHECK(subtract(w.ctx, env, v, make_int_type()).ok());
    CHECK(subtract(w.ctx, env, r, mtree_int()).ok());
}

TEST_CASE("bar permissions split into their atoms") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    VarId y = w.vars.fresh("y");
    TypePtr bar = make_bar(make_int_type(), {PermAtomExpr{"y", y, list_int()}});
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, bar, {}});
    CHECK(subtract(w.ctx, env, x, make_int_type()).ok());
    CHECK(subtract(w.ctx, env, y, list_int()).ok());
}

TEST_CASE("subtraction consumes exclusive atoms and keeps duplicable ones") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    VarId y = w.vars.fresh("y");
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, mtree_int(), {}});
    env = add_permission(w.ctx, w.vars, env, {y, list_int(), {}});

    SubtractResult r1 = subtract(w.ctx, env, x, mtree_int());
    REQUIRE(r1.ok());
    CHECK(!subtract(w.ctx, *r1.env, x, mtree_int()).ok()); // consumed
    CHECK(subtract(w.ctx, *r1.env, y, list_int()).ok());   // framed

    SubtractResult r2 = subtract(w.ctx, env, y, list_int());
    REQUIRE(r2.ok());
    CHECK(subtract(w.ctx, *r2.env, y, list_int()).ok()); // retained
}

TEST_CASE("subtraction chases equalities") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    VarId z = w.vars.fresh("z");
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, mtree_int(), {}});
    env.unite(x, z);
    CHECK(subtract(w.ctx, env, z, mtree_int()).ok());
    CHECK(!subtract(w.ctx, env, z, list_int()).ok());
}

TEST_CASE("tuple goals decompose componentwise") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    TypePtr pair = make_tuple_type({make_int_type(), list_int()});
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, pair, {}});
    CHECK(subtract(w.ctx, env, x, pair).ok());
    CHECK(!subtract(w.ctx, env, x,
                    make_tuple_type({make_string_type(), list_int()}))
               .ok());
}

TEST_CASE("nominal goals fold structural atoms back through their origin") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    PermEnv env = add_permission(
        w.ctx, w.vars, {}, {x, make_structural("Null", {}), mtree_int()});
    SubtractResult r = subtract(w.ctx, env, x, mtree_int());
    REQUIRE(r.ok());
    CHECK(atoms_on(*r.env, x) == 0);
}

TEST_CASE("folding a refined node consumes the field permissions") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, mtree_int(), {}});
    auto refined = refine_match(w.ctx, w.vars, env, x, "Node", "t.mz", Loc{1, 1});
    REQUIRE(refined.has_value());
    const Permission* s = structural_on(*refined, x);
    REQUIRE(s != nullptr);
    VarId l = field_var(*s, "left");
    SubtractResult r = subtract(w.ctx, *refined, x, mtree_int());
    REQUIRE(r.ok());
    CHECK(atoms_on(*r.env, x) == 0);
    CHECK(!subtract(w.ctx, *r.env, l, mtree_int()).ok()); // left went into the fold
}

TEST_CASE("structural goals demand the exact field aliases") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, mtree_int(), {}});
    auto refined = refine_match(w.ctx, w.vars, env, x, "Node", "t.mz", Loc{1, 1});
    REQUIRE(refined.has_value());
    const Permission* s = structural_on(*refined, x);
    VarId r = field_var(*s, "right");
    VarId sib = w.vars.fresh("s");

    TypePtr goal = make_structural("Node", {{"left", mtree_int()},
                                            {"value", make_int_type()},
                                            {"right", make_singleton_var(sib)}});
    SubtractResult miss = subtract(w.ctx, *refined, x, goal);
    CHECK(!miss.ok());
    REQUIRE(!miss.chain.empty());
    std::string leaf = print_goal(miss.chain.back().subject,
                                  miss.chain.back().wanted, w.vars);
    CHECK(leaf.find("=s") != std::string::npos);

    PermEnv aliased = *refined;
    aliased.unite(r, sib);
    CHECK(subtract(w.ctx, aliased, x, goal).ok());
}

TEST_CASE("refining against a contradicting tag reports a dead arm") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, mtree_int(), {}});
    auto node = refine_match(w.ctx, w.vars, env, x, "Node", "t.mz", Loc{1, 1});
    REQUIRE(node.has_value());
    auto dead = refine_match(w.ctx, w.vars, *node, x, "Null", "t.mz", Loc{1, 1});
    CHECK(!dead.has_value());
}

TEST_CASE("refining with no supporting permission is an error") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    CHECK_THROWS_AS(
        (void)refine_match(w.ctx, w.vars, PermEnv{}, x, "Node", "t.mz", Loc{1, 1}),
        CheckError);
}

TEST_CASE("immutable data still refines for matching") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, list_int(), {}});
    auto cons = refine_match(w.ctx, w.vars, env, x, "Cons", "t.mz", Loc{1, 1});
    REQUIRE(cons.has_value());
    const Permission* s = structural_on(*cons, x);
    REQUIRE(s != nullptr);
    VarId h = field_var(*s, "head");
    VarId t = field_var(*s, "tail");
    CHECK(subtract(w.ctx, *cons, h, make_int_type()).ok());
    CHECK(subtract(w.ctx, *cons, t, list_int()).ok());
}

TEST_CASE("field writes redirect mutable fields and strand the old target") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    VarId y = w.vars.fresh("y");
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, mtree_int(), {}});
    env = add_permission(w.ctx, w.vars, env, {y, mtree_int(), {}});
    auto refined = refine_match(w.ctx, w.vars, env, x, "Node", "t.mz", Loc{1, 1});
    REQUIRE(refined.has_value());
    VarId old_right = field_var(*structural_on(*refined, x), "right");

    PermEnv written = check_field_write(w.ctx, w.vars, *refined, x, "right", y,
                                        "t.mz", Loc{1, 1});
    const Permission* s = structural_on(written, x);
    REQUIRE(s != nullptr);
    CHECK(written.same(field_var(*s, "right"), y));
    // The previous right subtree keeps its own permission; the node folds
    // around the new one.
    CHECK(subtract(w.ctx, written, old_right, mtree_int()).ok());
    SubtractResult folded = subtract(w.ctx, written, x, mtree_int());
    REQUIRE(folded.ok());
    CHECK(!subtract(w.ctx, *folded.env, y, mtree_int()).ok()); // y was folded in
}

TEST_CASE("writing a field of immutable data is rejected") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    VarId y = w.vars.fresh("y");
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, list_int(), {}});
    env = add_permission(w.ctx, w.vars, env, {y, make_int_type(), {}});
    auto cons = refine_match(w.ctx, w.vars, env, x, "Cons", "t.mz", Loc{1, 1});
    REQUIRE(cons.has_value());
    try {
        check_field_write(w.ctx, w.vars, *cons, x, "head", y, "t.mz", Loc{2, 3});
        FAIL("expected a check error");
    } catch (const CheckError& e) {
        CHECK(e.diag.code == DiagCode::EImmutWrite);
    }
}

TEST_CASE("try_fold restores the nominal origin and consumes the fields") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, mtree_int(), {}});
    auto refined = refine_match(w.ctx, w.vars, env, x, "Node", "t.mz", Loc{1, 1});
    REQUIRE(refined.has_value());
    size_t idx = refined->atoms_.size();
    for (size_t i = 0; i < refined->atoms_.size(); ++i)
        if (refined->atoms_[i].type->kind == TypeExpr::Kind::Structural &&
            refined->find(refined->atoms_[i].subject) == refined->find(x))
            idx = i;
    REQUIRE(idx < refined->atoms_.size());

    auto folded = try_fold(w.ctx, *refined, idx);
    REQUIRE(folded.has_value());
    CHECK(subtract(w.ctx, *folded, x, mtree_int()).ok());
    CHECK(structural_on(*folded, x) == nullptr);

    // Once a field permission is gone the fold cannot close.
    VarId l = field_var(*structural_on(*refined, x), "left");
    SubtractResult stolen = subtract(w.ctx, *refined, l, mtree_int());
    REQUIRE(stolen.ok());
    size_t idx2 = stolen.env->atoms_.size();
    for (size_t i = 0; i < stolen.env->atoms_.size(); ++i)
        if (stolen.env->atoms_[i].type->kind == TypeExpr::Kind::Structural &&
            stolen.env->find(stolen.env->atoms_[i].subject) ==
                stolen.env->find(x))
            idx2 = i;
    REQUIRE(idx2 < stolen.env->atoms_.size());
    CHECK(!try_fold(w.ctx, *stolen.env, idx2).has_value());
}

TEST_CASE("merging match arms folds both shapes back to the nominal") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, mtree_int(), {}});
    auto null_arm = refine_match(w.ctx, w.vars, env, x, "Null", "t.mz", Loc{1, 1});
    auto node_arm = refine_match(w.ctx, w.vars, env, x, "Node", "t.mz", Loc{1, 1});
    REQUIRE(null_arm.has_value());
    REQUIRE(node_arm.has_value());
    PermEnv merged = merge_branches(w.ctx, w.vars, {*null_arm, *node_arm});
    CHECK(!merged.inconsistent);
    CHECK(structural_on(merged, x) == nullptr);
    CHECK(subtract(w.ctx, merged, x, mtree_int()).ok());
}

TEST_CASE("merge drops inconsistent branches") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    PermEnv live = add_permission(w.ctx, w.vars, {}, {x, mtree_int(), {}});
    PermEnv dead = add_permission(w.ctx, w.vars, live, {x, mtree_int(), {}});
    REQUIRE(dead.inconsistent);
    PermEnv merged = merge_branches(w.ctx, w.vars, {dead, live});
    CHECK(!merged.inconsistent);
    CHECK(subtract(w.ctx, merged, x, mtree_int()).ok());

    PermEnv all_dead = merge_branches(w.ctx, w.vars, {dead, dead});
    CHECK(all_dead.inconsistent);
}

TEST_CASE("merge keeps only equalities common to all branches") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    VarId y = w.vars.fresh("y");
    PermEnv a;
    a.unite(x, y);
    PermEnv b;
    b.unite(x, y);
    PermEnv both = merge_branches(w.ctx, w.vars, {a, b});
    CHECK(both.same(x, y));
    PermEnv c;
    PermEnv one = merge_branches(w.ctx, w.vars, {a, c});
    CHECK(!one.same(x, y));
}

TEST_CASE("environments print in star-joined notation") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    VarId y = w.vars.fresh("y");
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, mtree_int(), {}});
    env = add_permission(w.ctx, w.vars, env, {y, list_int(), {}});
    std::string text = print_env(env, w.vars);
    CHECK(text.find("x @ mtree int") != std::string::npos);
    CHECK(text.find("y @ list int") != std::string::npos);
    CHECK(text.find(" * ") != std::string::npos);

    PermEnv dead = add_permission(w.ctx, w.vars, env, {x, mtree_int(), {}});
    CHECK(print_env(dead, w.vars) == "<inconsistent>");
}

TEST_CASE("an inconsistent environment proves any goal") {
    GenWorld w;
    VarId x = w.vars.fresh("x");
    PermEnv env = add_permission(w.ctx, w.vars, {}, {x, mtree_int(), {}});
    env = add_permission(w.ctx, w.vars, env, {x, mtree_int(), {}});
    REQUIRE(env.inconsistent);
    VarId ghost = w.vars.fresh("g");
    CHECK(subtract(w.ctx, env, ghost,
                   make_tuple_type({make_int_type(), make_string_type()}))
              .ok());
}
