#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mezzo/ast.hpp"
#include "mezzo/diagnostics.hpp"
#include "mezzo/perm.hpp"
#include "mezzo/typesys.hpp"

namespace mezzo {

struct FnSignature {
    std::string name;
    std::vector<std::string> typarams;
    std::vector<ArrowParam> params;
    TypePtr ret;
};

/// --dump-perms probe: the environment is captured at the first visit of any
/// expression node that starts on `line`.
struct DumpRequest {
    int line = 0;
    bool hit = false;
    std::string text;
};

struct CheckResult {
    std::vector<Diagnostic> diagnostics;
    bool ok = false; // true iff no error-severity diagnostic was produced
};

CheckResult check_program(const Ast& ast, const std::string& file,
                          DumpRequest* dump = nullptr);

/// The three built-in integer functions every program can call:
/// compare_int, add_int, leq_int, all (int, int) -> int.
std::vector<FnSignature> prelude_signatures();

} // namespace mezzo
