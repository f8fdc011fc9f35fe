#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mezzo/ast.hpp"
#include "mezzo/diagnostics.hpp"
#include "mezzo/typesys.hpp"

namespace mezzo {

/// Allocates variable ids and display names. Display names are reused across
/// name scopes (one scope per function) so diagnostics stay short.
class VarTable {
public:
    VarId fresh(const std::string& want);
    VarId fresh_synthetic();
    const std::string& name(VarId v) const { return names_[v]; }
    bool is_synthetic(VarId v) const { return names_[v][0] == '%'; }
    /// Renames a synthetic variable after a let binding.
    void adopt(VarId v, const std::string& want);
    void push_scope();
    void pop_scope();
    size_t size() const { return names_.size(); }

private:
    std::string claim(const std::string& want);
    std::vector<std::string> names_;
    std::vector<std::set<std::string>> scopes_{1};
};

/// One atomic fact `subject @ type`. Structural atoms remember the nominal
/// type they were refined or allocated from, which drives instantiation and
/// branch merging; it is absent when the arguments could not be determined.
struct Permission {
    VarId subject = kNoVar;
    TypePtr type;
    std::optional<TypePtr> fold_origin;
};

struct PermEnv {
    std::map<VarId, VarId> parent_;
    std::vector<Permission> atoms_;
    bool inconsistent = false;

    VarId find(VarId v) const;
    void unite(VarId a, VarId b);
    bool same(VarId a, VarId b) const { return find(a) == find(b); }
};

/// Type equality where singleton types compare by equality class.
bool type_equal_in(const PermEnv& env, const TypePtr& a, const TypePtr& b);

/// Rewrites the environment to canonical form: atoms keyed by canonical
/// subjects, structural fields expanded to singletons of fresh variables,
/// singleton atoms turned into equalities, bar atoms split, duplicable
/// duplicates removed, and an exclusive collision marking inconsistency.
PermEnv canonicalize(const TypeContext& ctx, VarTable& vars, PermEnv env);

PermEnv add_permission(const TypeContext& ctx, VarTable& vars, PermEnv env,
                       Permission p);

struct SubGoal {
    VarId subject = kNoVar;
    TypePtr wanted;
};

struct SubtractResult {
    std::optional<PermEnv> env;
    /// On failure: the goal path from the original request down to the
    /// sub-goal that could not be proved.
    std::vector<SubGoal> chain;
    bool ok() const { return env.has_value(); }
};

/// Proof search removing what proves `x @ t`; duplicable atoms used by the
/// proof are retained, others are consumed. Explores atom and unfolding
/// alternatives in deterministic order and commits to the first full proof.
SubtractResult subtract(const TypeContext& ctx, const PermEnv& env, VarId x,
                        const TypePtr& t);

/// Trades a nominal permission on x for the structural form of one branch.
/// Returns nothing when the branch contradicts an existing structural atom
/// (the match arm is dead). Throws CheckError when no permission on x could
/// support the constructor at all.
std::optional<PermEnv> refine_match(const TypeContext& ctx, VarTable& vars,
                                    PermEnv env, VarId x, const std::string& ctor,
                                    const std::string& file, Loc loc);

/// Redirects a mutable structural field to y. The old field target keeps its
/// own atoms; they simply become unreachable through x.
PermEnv check_field_write(const TypeContext& ctx, VarTable& vars, PermEnv env,
                          VarId x, const std::string& field, VarId y,
                          const std::string& file, Loc loc);

/// Attempts to fold one structural atom back to its recorded nominal origin,
/// consuming the field permissions the declaration demands. Returns nothing
/// when a field obligation cannot be met.
std::optional<PermEnv> try_fold(const TypeContext& ctx, const PermEnv& env,
                                size_t atom_index);

/// Join of branch exit environments: each is first normalized by folding
/// structural atoms back to their origins where possible, then the result
/// keeps exactly the atoms present in every branch and the equalities common
/// to all. Inconsistent branches are dropped; if none survive, the result is
/// a single inconsistent env.
PermEnv merge_branches(const TypeContext& ctx, VarTable& vars,
                       std::vector<PermEnv> envs);

/// Star notation: atoms joined with `*`, equalities as `v = w`.
std::string print_env(const PermEnv& env, const VarTable& vars);

std::string print_atom(const Permission& p, const VarTable& vars);
std::string print_goal(VarId subject, const TypePtr& t, const VarTable& vars);

} // namespace mezzo
