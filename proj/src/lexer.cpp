#include "mezzo/lexer.hpp"

#include <array>
#include <cctype>

namespace mezzo {

namespace {

const std::array<const char*, 16> kKeywords = {
    "data", "mutable", "val", "rec", "and", "fun", "let", "in",
    "match", "with", "if", "then", "else", "begin", "end", "consumes",
};

struct Cursor {
    const std::string& src;
    const std::string& file;
    size_t pos = 0;
    Loc loc{1, 1};

    bool done() const { return pos >= src.size(); }
    char peek(size_t ahead = 0) const {
        return pos + ahead < src.size() ? src[pos + ahead] : '\0';
    }
    char pop() {
        char c = src[pos++];
        if (c == '\n') {
            loc.line++;
            loc.column = 1;
        } else {
            loc.column++;
        }
        return c;
    }
    [[noreturn]] void fail(Loc at, const std::string& msg) const {
        throw SyntaxError({file, at, DiagCode::EParse, msg, {}});
    }
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_cont(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

void skip_comment(Cursor& cur) {
    Loc open = cur.loc;
    cur.pop(); // '('
    cur.pop(); // '*'
    int depth = 1;
    while (depth > 0) {
        if (cur.done()) {
            cur.fail(open, "unterminated comment");
        }
        if (cur.peek() == '(' && cur.peek(1) == '*') {
            cur.pop();
            cur.pop();
            depth++;
        } else if (cur.peek() == '*' && cur.peek(1) == ')') {
            cur.pop();
            cur.pop();
            depth--;
        } else {
            cur.pop();
        }
    }
}

std::string lex_string(Cursor& cur) {
    Loc open = cur.loc;
    cur.pop(); // '"'
    std::string text;
    while (true) {
        if (cur.done()) {
            cur.fail(open, "unterminated string literal");
        }
        char c = cur.pop();
        if (c == '"') {
            break;
        }
        if (c == '\\') {
            if (cur.done()) {
                cur.fail(open, "unterminated string literal");
            }
            char esc = cur.pop();
            switch (esc) {
            case 'n': text += '\n'; break;
            case 't': text += '\t'; break;
            case '"': text += '"'; break;
            case '\\': text += '\\'; break;
            default: cur.fail(cur.loc, std::string("unknown escape '\\") + esc + "'");
            }
        } else {
            text += c;
        }
    }
    return text;
}

} // namespace

bool is_keyword(const std::string& word) {
    for (const char* kw : kKeywords) {
        if (word == kw) {
            return true;
        }
    }
    return false;
}

std::vector<Token> lex(const std::string& source, const std::string& file) {
    Cursor cur{source, file};
    std::vector<Token> out;
    while (!cur.done()) {
        char c = cur.peek();
        if (std::isspace(static_cast<unsigned char>(c))) {
            cur.pop();
            continue;
        }
        if (c == '(' && cur.peek(1) == '*') {
            skip_comment(cur);
            continue;
        }
        Loc at = cur.loc;
        if (c == '"') {
            out.push_back({TokKind::StrLit, lex_string(cur), at});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string text;
            while (!cur.done() && std::isdigit(static_cast<unsigned char>(cur.peek()))) {
                text += cur.pop();
            }
            out.push_back({TokKind::IntLit, text, at});
            continue;
        }
        if (ident_start(c)) {
            std::string text;
            while (!cur.done() && ident_cont(cur.peek())) {
                text += cur.pop();
            }
            TokKind kind = is_keyword(text) ? TokKind::Keyword
                           : std::isupper(static_cast<unsigned char>(text[0]))
                               ? TokKind::CapIdent
                               : TokKind::Ident;
            out.push_back({kind, text, at});
            continue;
        }
        // multi-char punctuation first
        if (c == '-' && cur.peek(1) == '>') {
            cur.pop();
            cur.pop();
            out.push_back({TokKind::Punct, "->", at});
            continue;
        }
        if (c == '<' && cur.peek(1) == '-') {
            cur.pop();
            cur.pop();
            out.push_back({TokKind::Punct, "<-", at});
            continue;
        }
        static const std::string singles = "(){}[],;:|@*=.";
        if (singles.find(c) != std::string::npos) {
            cur.pop();
            out.push_back({TokKind::Punct, std::string(1, c), at});
            continue;
        }
        cur.fail(at, std::string("illegal character '") + c + "'");
    }
    out.push_back({TokKind::Eof, "", cur.loc});
    return out;
}

} // namespace mezzo
