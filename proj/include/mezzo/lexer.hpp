#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mezzo/diagnostics.hpp"

namespace mezzo {

enum class TokKind {
    Keyword,
    Ident,      // lowercase or '_' start
    CapIdent,   // constructor names
    IntLit,
    StrLit,
    Punct,
    Eof,
};

struct Token {
    TokKind kind = TokKind::Eof;
    std::string text;
    Loc loc;

    bool is_kw(std::string_view kw) const { return kind == TokKind::Keyword && text == kw; }
    bool is_punct(std::string_view p) const { return kind == TokKind::Punct && text == p; }
};

bool is_keyword(const std::string& word);

/// Tokenizes `source`. Comments are `(* ... *)` and nest. Throws SyntaxError
/// on an unterminated string or comment, or an illegal character.
std::vector<Token> lex(const std::string& source, const std::string& file = "<input>");

} // namespace mezzo
