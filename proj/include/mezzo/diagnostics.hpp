#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mezzo {

struct Loc {
    int line = 0;   // 1-based
    int column = 0; // 1-based

    bool valid() const { return line > 0 && column > 0; }
    bool operator==(const Loc&) const = default;
};

enum class DiagCode {
    EParse,
    EKind,
    EMode,
    ESubtract,
    EReturn,
    EImmutWrite,
    EInstantiate,
    WDeadcode,
};

const char* diag_code_name(DiagCode code);
bool parse_diag_code(const std::string& name, DiagCode& out);
bool diag_is_error(DiagCode code);

/// One reported problem. `subgoals` carries the failing proof trace for
/// permission errors, outermost goal first.
struct Diagnostic {
    std::string file;
    Loc loc;
    DiagCode code = DiagCode::EParse;
    std::string message;
    std::vector<std::string> subgoals;

    bool operator==(const Diagnostic&) const = default;
};

/// `file:line:col: error[CODE]: message`
std::string format_human(const Diagnostic& d, bool color = false);

std::string diagnostics_to_json(const std::vector<Diagnostic>& diags);
std::vector<Diagnostic> diagnostics_from_json(const std::string& text);

/// Thrown by the lexer and parser; the driver turns it into a single
/// diagnostic with exit code 2.
struct SyntaxError : std::runtime_error {
    Diagnostic diag;
    explicit SyntaxError(Diagnostic d) : std::runtime_error(d.message), diag(std::move(d)) {}
};

/// Thrown by the checker when a path cannot continue.
struct CheckError : std::runtime_error {
    Diagnostic diag;
    explicit CheckError(Diagnostic d) : std::runtime_error(d.message), diag(std::move(d)) {}
};

} // namespace mezzo
