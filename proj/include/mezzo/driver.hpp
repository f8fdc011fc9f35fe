#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mezzo {

struct CheckConfig {
    std::vector<std::string> files;
    std::string format = "human";            // human | json
    std::optional<std::string> dump_perms;   // FILE:LINE
    bool color = false;
};

struct RunConfig {
    std::string file;
    std::string entry = "main";
    bool unchecked = false;
    bool color = false;
};

/// Checks each file (in parallel), emits buffered diagnostics in input
/// order. Exit code: 2 on any lex/parse failure, else 1 on any check error,
/// else 0 (warnings allowed).
int run_check(const CheckConfig& cfg, std::ostream& out, std::ostream& err);

/// Checks (unless unchecked) then evaluates the entry point and prints its
/// value. Exit code: 2 parse, 1 check error, 3 runtime fault, else 0.
int run_exec(const RunConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace mezzo
