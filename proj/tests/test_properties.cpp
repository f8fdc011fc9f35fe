#include "doctest.h"

#include "prop_checks.hpp"

using mezzo::testprop::PropResult;

namespace {

void expect_clean(const PropResult& r) {
    CHECK(r.cases >= 200);
    CHECK_MESSAGE(r.ok(), r.failures, " of ", r.cases,
                  " cases failed; first: ", r.first_failure);
}

} // namespace

TEST_CASE("duplicable atoms survive every successful subtraction") {
    expect_clean(mezzo::testprop::prop_duplicable_preservation(200, 11));
}

TEST_CASE("subtracting an exclusive atom consumes it exactly once") {
    expect_clean(mezzo::testprop::prop_exclusive_linearity(200, 22));
}

TEST_CASE("unrelated atoms frame around any subtraction") {
    expect_clean(mezzo::testprop::prop_frame(200, 33));
}

TEST_CASE("merging a branch with itself changes nothing") {
    expect_clean(mezzo::testprop::prop_merge_idempotent(200, 44));
}

TEST_CASE("merging is insensitive to branch order") {
    expect_clean(mezzo::testprop::prop_merge_commutative(200, 55));
}

TEST_CASE("refining and folding back round trips the environment") {
    expect_clean(mezzo::testprop::prop_refine_fold_round_trip(200, 66));
}

TEST_CASE("inconsistency, once established, proves everything") {
    expect_clean(mezzo::testprop::prop_inconsistency_absorbing(200, 77));
}

TEST_CASE("variable equality is transitive for proofs") {
    expect_clean(mezzo::testprop::prop_equality_transitive(200, 88));
}
