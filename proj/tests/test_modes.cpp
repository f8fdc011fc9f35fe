#include "doctest.h"

#include "env_gen.hpp"
#include "mezzo/ast.hpp"
#include "mezzo/typesys.hpp"

using namespace mezzo;
using mezzo::testgen::GenWorld;

namespace {

/// The generator's world (mtree mutable, list immutable, box mutable) with
/// one abstract type variable `a` in scope.
struct ModeWorld {
    GenWorld w;
    TypeContext ctx;
    ModeWorld() : ctx(w.ctx) { ctx.tyvars.insert("a"); }
};

} // namespace

TEST_CASE("mode table over representative types") {
    ModeWorld mw;
    const TypeContext& ctx = mw.ctx;

    auto mt = [&](const TypePtr& t) { return infer_mode(ctx, t); };

    // The five canonical rows.
    CHECK(mt(make_tuple_type({make_int_type(), make_string_type()})) ==
          Mode::Duplicable);
    CHECK(mt(make_nominal("mtree", {make_string_type()})) == Mode::Exclusive);
    CHECK(mt(make_type_var("a")) == Mode::Affine);
    CHECK(mt(make_nominal("list", {make_int_type()})) == Mode::Duplicable);
    CHECK(mt(make_nominal("list", {make_type_var("a")})) == Mode::Affine);
}

TEST_CASE("modes of scalars, functions, and singletons") {
    ModeWorld mw;
    const TypeContext& ctx = mw.ctx;
    CHECK(infer_mode(ctx, make_int_type()) == Mode::Duplicable);
    CHECK(infer_mode(ctx, make_string_type()) == Mode::Duplicable);
    CHECK(infer_mode(ctx, make_singleton_name("x")) == Mode::Duplicable);
    TypePtr arrow = make_arrow({{"", true, make_nominal("mtree", {make_int_type()})}},
                               make_int_type());
    CHECK(infer_mode(ctx, arrow) == Mode::Duplicable);
}

TEST_CASE("structural types take the declaration's mutability") {
    ModeWorld mw;
    const TypeContext& ctx = mw.ctx;
    TypePtr node = make_structural(
        "Node", {{"left", make_nominal("mtree", {make_int_type()})},
                 {"value", make_int_type()},
                 {"right", make_nominal("mtree", {make_int_type()})}});
    CHECK(infer_mode(ctx, node) == Mode::Exclusive);
    TypePtr cons = make_structural(
        "Cons", {{"head", make_int_type()},
                 {"tail", make_nominal("list", {make_int_type()})}});
    CHECK(infer_mode(ctx, cons) == Mode::Duplicable);
}

TEST_CASE("a tuple around an exclusive or affine part is affine, not exclusive") {
    ModeWorld mw;
    const TypeContext& ctx = mw.ctx;
    TypePtr t1 = make_tuple_type(
        {make_int_type(), make_nominal("mtree", {make_string_type()})});
    CHECK(infer_mode(ctx, t1) == Mode::Affine);
    TypePtr t2 = make_tuple_type({make_type_var("a"), make_string_type()});
    CHECK(infer_mode(ctx, t2) == Mode::Affine);
}

TEST_CASE("bar types are duplicable only when value and permissions all are") {
    ModeWorld mw;
    const TypeContext& ctx = mw.ctx;
    PermAtomExpr dup{"x", kNoVar, make_nominal("list", {make_int_type()})};
    CHECK(infer_mode(ctx, make_bar(make_int_type(), {dup})) == Mode::Duplicable);
    PermAtomExpr excl{"x", kNoVar, make_nominal("mtree", {make_int_type()})};
    CHECK(infer_mode(ctx, make_bar(make_int_type(), {excl})) == Mode::Affine);
}

TEST_CASE("tuple mode join truth table") {
    CHECK(tuple_mode_join(Mode::Duplicable, Mode::Duplicable) == Mode::Duplicable);
    CHECK(tuple_mode_join(Mode::Duplicable, Mode::Exclusive) == Mode::Affine);
    CHECK(tuple_mode_join(Mode::Exclusive, Mode::Duplicable) == Mode::Affine);
    CHECK(tuple_mode_join(Mode::Duplicable, Mode::Affine) == Mode::Affine);
    CHECK(tuple_mode_join(Mode::Affine, Mode::Affine) == Mode::Affine);
}

TEST_CASE("mode names used in diagnostics") {
    CHECK(std::string(mode_name(Mode::Duplicable)) == "duplicable");
    CHECK(std::string(mode_name(Mode::Exclusive)) == "exclusive");
    CHECK(std::string(mode_name(Mode::Affine)) == "affine");
}
