// Acceptance gate: exercises the ten shipping criteria end to end and prints
// one PASS/FAIL line per criterion. Exit code is the number of failures.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "bst_harness.hpp"
#include "env_gen.hpp"
#include "env_text.hpp"
#include "mezzo/checker.hpp"
#include "mezzo/diagnostics.hpp"
#include "mezzo/interp.hpp"
#include "mezzo/parser.hpp"
#include "mezzo/perm.hpp"
#include "mezzo/printer.hpp"
#include "mezzo/typesys.hpp"
#include "oracle.hpp"
#include "prop_checks.hpp"
#include "subprocess.hpp"

using namespace mezzo;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kCorpusBudgetSeconds = 1.0;
constexpr double kOracleBudgetSeconds = 60.0;
constexpr int kOracleCases = 1200;  // floor: 1000
constexpr int kBstCases = 500;      // floor: 500
constexpr int kPropCases = 200;     // floor per property: 200

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome passed(std::string detail) { return {true, std::move(detail)}; }
Outcome failed(std::string detail) { return {false, std::move(detail)}; }

std::string corpus(const std::string& rel) {
    return (fs::path(MEZZO_CORPUS_DIR) / rel).string();
}

CheckResult check_file(const std::string& path, DumpRequest* dump = nullptr) {
    Ast ast = parse_source(testproc::slurp_file(path), path);
    return check_program(ast, path, dump);
}

int count_errors(const CheckResult& cr) {
    return static_cast<int>(
        std::count_if(cr.diagnostics.begin(), cr.diagnostics.end(),
                      [](const Diagnostic& d) { return diag_is_error(d.code); }));
}

const Diagnostic* sole_error(const CheckResult& cr) {
    const Diagnostic* found = nullptr;
    for (const auto& d : cr.diagnostics) {
        if (!diag_is_error(d.code)) continue;
        if (found) return nullptr;
        found = &d;
    }
    return found;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

// --- criterion 1: the tree-splitting corpus checks clean inside the budget --

Outcome criterion_corpus() {
    auto start = std::chrono::steady_clock::now();
    CheckResult cr = check_file(corpus("accepted/bst.mz"));
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (!cr.ok || count_errors(cr) != 0)
        return failed("the tree-splitting corpus no longer checks clean");
    if (secs >= kCorpusBudgetSeconds)
        return failed("checking took " + std::to_string(secs) + " s (budget " +
                      std::to_string(kCorpusBudgetSeconds) + " s)");
    int clean = 0;
    for (const auto& entry :
         fs::directory_iterator(fs::path(MEZZO_CORPUS_DIR) / "accepted")) {
        if (entry.path().extension() != ".mz") continue;
        if (!check_file(entry.path().string()).ok)
            return failed(entry.path().filename().string() + " fails to check");
        ++clean;
    }
    std::ostringstream os;
    os << "the splitter corpus checks with zero errors in " << static_cast<int>(secs * 1000)
       << " ms (< 1000 ms); " << clean << " accepted files clean";
    return passed(os.str());
}

// --- criterion 2: deleting the left-subtree reattachment ---------------------

Outcome criterion_missing_assign() {
    CheckResult cr = check_file(corpus("rejected/bst_missing_assign.mz"));
    const Diagnostic* d = sole_error(cr);
    if (!d) return failed("expected exactly one error, got " +
                          std::to_string(count_errors(cr)));
    if (d->code != DiagCode::EReturn)
        return failed(std::string("error code is ") + diag_code_name(d->code));
    if (d->subgoals.empty() || !contains(d->subgoals.back(), "l @ mtree a"))
        return failed("failing sub-goal does not name the left subtree's tree obligation");
    return passed("one E-RETURN whose failing sub-goal is `" + d->subgoals.back() + "`");
}

// --- criterion 3: returning an aliased subtree -------------------------------

Outcome criterion_alias_return() {
    CheckResult cr = check_file(corpus("rejected/alias_return.mz"));
    const Diagnostic* d = sole_error(cr);
    if (!d) return failed("expected exactly one error, got " +
                          std::to_string(count_errors(cr)));
    if (d->code != DiagCode::EReturn && d->code != DiagCode::ESubtract)
        return failed(std::string("error code is ") + diag_code_name(d->code));
    if (d->subgoals.size() < 2 ||
        !contains(d->subgoals.front(), "(mtree a, mtree a)"))
        return failed("chain does not start at the returned pair");
    bool through_second = false;
    for (const auto& g : d->subgoals)
        if (contains(g, "t @ mtree a")) through_second = true;
    if (!through_second || !contains(d->subgoals.back(), "left_gt @ mtree a"))
        return failed("chain does not trace the second component through left_gt");
    return passed("fails at the second component, tracing to `" +
                  d->subgoals.back() + "`");
}

// --- criterion 4: signatures check; callers swap permissions ----------------

Outcome criterion_signatures() {
    if (!check_file(corpus("accepted/length.mz")).ok)
        return failed("the list-length implementation does not match its signature");
    if (!check_file(corpus("accepted/annotate.mz")).ok)
        return failed("the annotation implementation does not match its signature");

    std::string bin = MEZZO_BIN_PATH;
    std::string anno = corpus("accepted/annotate.mz");
    testproc::RunOutput before = testproc::run_command(
        bin + " check --dump-perms '" + anno + ":21' '" + anno + "'");
    testproc::RunOutput after = testproc::run_command(
        bin + " check --dump-perms '" + anno + ":22' '" + anno + "'");
    if (before.exit_code != 0 || after.exit_code != 0)
        return failed("permission dumps did not run cleanly");
    std::string env21 = testenv::dumped_env_line(before.output);
    std::string env22 = testenv::dumped_env_line(after.output);
    if (!testenv::has_atom(env21, "t @ mtree string") ||
        testenv::has_atom(env21, "t @ mtree (string, int)"))
        return failed("before the call the caller should hold t @ mtree string");
    if (testenv::has_atom(env22, "t @ mtree string") ||
        !testenv::has_atom(env22, "t @ mtree (string, int)"))
        return failed("after the call the caller should hold exactly t @ mtree (string, int)");
    return passed("both signatures check; --dump-perms shows t @ mtree string "
                  "becoming t @ mtree (string, int) across the call");
}

// --- criterion 5: the mode table --------------------------------------------

Outcome criterion_modes() {
    testgen::GenWorld w;
    TypeContext ctx = w.ctx;
    ctx.tyvars.insert("a");
    struct Row {
        TypePtr type;
        Mode want;
        const char* show;
    };
    const Row rows[] = {
        {make_tuple_type({make_int_type(), make_string_type()}),
         Mode::Duplicable, "(int, string)"},
        {make_nominal("mtree", {make_string_type()}), Mode::Exclusive,
         "mtree string"},
        {make_type_var("a"), Mode::Affine, "a"},
        {make_nominal("list", {make_int_type()}), Mode::Duplicable, "list int"},
        {make_nominal("list", {make_type_var("a")}), Mode::Affine, "list a"},
    };
    for (const auto& r : rows) {
        Mode got = infer_mode(ctx, r.type);
        if (got != r.want)
            return failed(std::string(r.show) + " inferred " + mode_name(got) +
                          ", want " + mode_name(r.want));
    }
    return passed("(int, string) duplicable; mtree string exclusive; a affine; "
                  "list int duplicable; list a affine");
}

// --- criterion 6: inconsistency makes the continuation dead ------------------

Outcome criterion_deadcode() {
    CheckResult cr = check_file(corpus("accepted/deadcode.mz"));
    if (count_errors(cr) != 0)
        return failed("a dead continuation still raised errors");
    int warnings = static_cast<int>(std::count_if(
        cr.diagnostics.begin(), cr.diagnostics.end(),
        [](const Diagnostic& d) { return d.code == DiagCode::WDeadcode; }));
    if (warnings < 1) return failed("no W-DEADCODE was emitted");
    if (!cr.ok) return failed("the file did not check");
    std::ostringstream os;
    os << "duplicated-tree hypothesis flagged with " << warnings
       << " W-DEADCODE warning(s); nonsense continuations check";
    return passed(os.str());
}

// --- criterion 7: the singleton field discipline -----------------------------

Outcome criterion_singleton() {
    CheckResult cr = check_file(corpus("rejected/split_right_sibling.mz"));
    const Diagnostic* d = sole_error(cr);
    if (!d) return failed("expected exactly one error, got " +
                          std::to_string(count_errors(cr)));
    if (d->code != DiagCode::ESubtract)
        return failed(std::string("error code is ") + diag_code_name(d->code));
    if (d->subgoals.empty() || !contains(d->subgoals.back(), "=s"))
        return failed("the failure is not at the singleton obligation");
    if (!check_file(corpus("accepted/bst.mz")).ok)
        return failed("the genuine right-child call stopped checking");
    return passed("sibling argument rejected at `" + d->subgoals.back() +
                  "`; the real right-child call checks");
}

// --- criterion 8: committed prover vs exhaustive oracle ----------------------

Outcome criterion_oracle() {
    testgen::GenWorld w;
    std::mt19937 rng(0xC0FFEE);
    auto start = std::chrono::steady_clock::now();
    int disagreements = 0;
    std::string first;
    for (int i = 0; i < kOracleCases; ++i) {
        PermEnv env = testgen::random_env(w, rng, 4);
        SubGoal g = testgen::random_goal(w, rng);
        bool committed = subtract(w.ctx, env, g.subject, g.wanted).ok();
        bool exhaustive = testor::entails(w.ctx, env, g.subject, g.wanted);
        if (committed != exhaustive && first.empty()) {
            ++disagreements;
            first = print_goal(g.subject, g.wanted, w.vars) + " under " +
                    print_env(env, w.vars);
        }
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (disagreements > 0)
        return failed("disagreement on " + first);
    if (secs >= kOracleBudgetSeconds)
        return failed("comparison took " + std::to_string(secs) + " s (budget " +
                      std::to_string(kOracleBudgetSeconds) + " s)");
    std::ostringstream os;
    os << kOracleCases << " random environments agree in " << std::fixed
       << std::setprecision(1) << secs << " s (< 60 s)";
    return passed(os.str());
}

// --- criterion 9: dynamic soundness smoke ------------------------------------

Outcome criterion_dynamic() {
    std::string lib = testproc::slurp_file(corpus("accepted/bst.mz"));
    std::mt19937 rng(20260819u);
    for (int i = 0; i < kBstCases; ++i) {
        testbst::BstCase c = testbst::random_bst_case(rng, 64, lib);
        testbst::BstOutcome o = testbst::run_bst_case(c);
        if (!o.ok)
            return failed("tree " + std::to_string(i) + " (size " +
                          std::to_string(c.values.size()) + "): " + o.error);
    }
    int executed = 0;
    for (const auto& entry :
         fs::directory_iterator(fs::path(MEZZO_CORPUS_DIR) / "accepted")) {
        if (entry.path().extension() != ".mz") continue;
        std::string path = entry.path().string();
        Ast ast = parse_source(testproc::slurp_file(path), path);
        bool has_main = false;
        for (const auto& d : ast.decls) {
            const auto* grp = std::get_if<ValGroup>(&d);
            if (!grp) continue;
            for (const auto& def : grp->defs)
                if (def.name == "main") has_main = true;
        }
        if (!has_main) continue;
        try {
            (void)eval_program(ast, "main", path);
            ++executed;
        } catch (const RuntimeFault& f) {
            return failed(entry.path().filename().string() +
                          " faulted at runtime: " + f.what());
        }
    }
    std::ostringstream os;
    os << kBstCases << " random splits match the reference partition with "
       << "disjoint blocks; " << executed << " corpus programs ran fault-free";
    return passed(os.str());
}

// --- criterion 10: the property suite ----------------------------------------

Outcome criterion_properties() {
    struct Prop {
        const char* name;
        testprop::PropResult (*run)(int, unsigned);
        unsigned seed;
    };
    const Prop props[] = {
        {"duplicable-preservation", testprop::prop_duplicable_preservation, 11},
        {"exclusive-linearity", testprop::prop_exclusive_linearity, 22},
        {"frame", testprop::prop_frame, 33},
        {"merge-idempotence", testprop::prop_merge_idempotent, 44},
        {"merge-commutativity", testprop::prop_merge_commutative, 55},
        {"refine-fold-round-trip", testprop::prop_refine_fold_round_trip, 66},
        {"inconsistency-absorbing", testprop::prop_inconsistency_absorbing, 77},
        {"equality-transitivity", testprop::prop_equality_transitive, 88},
    };
    for (const auto& p : props) {
        testprop::PropResult r = p.run(kPropCases, p.seed);
        if (r.cases < kPropCases)
            return failed(std::string(p.name) + " only generated " +
                          std::to_string(r.cases) + " cases");
        if (!r.ok())
            return failed(std::string(p.name) + ": " + r.first_failure);
    }
    std::ostringstream os;
    os << sizeof(props) / sizeof(props[0]) << " properties hold over >= "
       << kPropCases << " cases each";
    return passed(os.str());
}

} // namespace

int main() {
    struct Criterion {
        const char* title;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"corpus acceptance", criterion_corpus},
        {"missing reattachment rejected", criterion_missing_assign},
        {"aliased return rejected", criterion_alias_return},
        {"signature checks and permission swap", criterion_signatures},
        {"mode table", criterion_modes},
        {"inconsistency dead code", criterion_deadcode},
        {"singleton discipline", criterion_singleton},
        {"oracle equivalence", criterion_oracle},
        {"dynamic soundness smoke", criterion_dynamic},
        {"property suite", criterion_properties},
    };

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = failed(std::string("unexpected exception: ") + e.what());
        }
        if (!o.pass) ++failures;
        std::printf("criterion %2zu [%s]: %s — %s\n", i + 1, criteria[i].title,
                    o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failures,
                criteria.size());
    return failures;
}
