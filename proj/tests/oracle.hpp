#pragma once

#include "mezzo/perm.hpp"
#include "mezzo/typesys.hpp"

namespace mezzo::testor {

/// Complete entailment search: tries every atom in every order-independent
/// combination and every unfolding branch of a nominal goal, backtracking
/// through all of them. It shares the subtraction semantics (equality
/// chasing, duplicable retention, componentwise decomposition) but none of
/// the committed search strategy, making it an oracle for success/failure.
/// Bounded by the same generous depth and step budgets as the checker; exhaustion counts as failure,
/// mirroring the checker's caps.
bool entails(const TypeContext& ctx, const PermEnv& env, VarId x,
             const TypePtr& t);

} // namespace mezzo::testor
