#include "mezzo/parser.hpp"

#include <functional>
#include <set>

namespace mezzo {

namespace {

[[noreturn]] void parse_fail(const std::string& file, Loc loc, const std::string& what) {
    Diagnostic d;
    d.file = file;
    d.loc = loc;
    d.code = DiagCode::EParse;
    d.message = what;
    throw SyntaxError(d);
}

class Parser {
public:
    Parser(const std::vector<Token>& toks, std::string file)
        : toks_(toks), file_(std::move(file)) {}

    Ast program() {
        Ast ast;
        while (!at_eof()) {
            if (peek().is_kw("data")) {
                ast.decls.emplace_back(data_decl());
            } else if (peek().is_kw("val")) {
                ast.decls.emplace_back(val_group());
            } else {
                fail("expected a `data` or `val` declaration");
            }
        }
        return ast;
    }

    TypePtr standalone_type() {
        TypePtr t = type();
        if (!at_eof()) fail("unexpected input after type");
        return t;
    }

private:
    const std::vector<Token>& toks_;
    std::string file_;
    size_t pos_ = 0;
    std::vector<std::set<std::string>> tyvars_;

    const Token& peek(size_t ahead = 0) const {
        size_t i = pos_ + ahead;
        if (i >= toks_.size()) i = toks_.size() - 1;
        return toks_[i];
    }
    const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool at_eof() const { return peek().kind == TokKind::Eof; }

    [[noreturn]] void fail(const std::string& what) const {
        parse_fail(file_, peek().loc, what + " (found `" + peek().text + "`)");
    }

    bool eat_punct(const std::string& p) {
        if (peek().is_punct(p)) {
            advance();
            return true;
        }
        return false;
    }
    void expect_punct(const std::string& p) {
        if (!eat_punct(p)) fail("expected `" + p + "`");
    }
    bool eat_kw(const std::string& k) {
        if (peek().is_kw(k)) {
            advance();
            return true;
        }
        return false;
    }
    void expect_kw(const std::string& k) {
        if (!eat_kw(k)) fail("expected `" + k + "`");
    }
    std::string expect_ident() {
        if (peek().kind != TokKind::Ident) fail("expected an identifier");
        return advance().text;
    }
    std::string expect_cap_ident() {
        if (peek().kind != TokKind::CapIdent) fail("expected a constructor name");
        return advance().text;
    }

    bool tyvar_in_scope(const std::string& name) const {
        for (const auto& scope : tyvars_)
            if (scope.count(name)) return true;
        return false;
    }

    // ---- types ----------------------------------------------------------

    TypePtr type() {
        Loc loc = peek().loc;
        if (peek().is_punct("[")) {
            advance();
            std::vector<std::string> binders;
            binders.push_back(expect_ident());
            while (eat_punct(",")) binders.push_back(expect_ident());
            expect_punct("]");
            tyvars_.push_back({binders.begin(), binders.end()});
            TypePtr body = type();
            tyvars_.pop_back();
            return make_forall(std::move(binders), std::move(body), loc);
        }
        TypePtr head = type_app();
        if (eat_punct("->")) {
            std::vector<ArrowParam> params;
            params.push_back(ArrowParam{"", false, head});
            return make_arrow(std::move(params), type(), loc);
        }
        return head;
    }

    TypePtr type_app() {
        Loc loc = peek().loc;
        if (peek().kind == TokKind::Ident) {
            std::string name = advance().text;
            if (name == "int") return make_int_type(loc);
            if (name == "string") return make_string_type(loc);
            if (tyvar_in_scope(name)) return make_type_var(name, loc);
            std::vector<TypePtr> args;
            while (starts_type_atom()) args.push_back(type_atom());
            return make_nominal(name, std::move(args), loc);
        }
        return type_atom();
    }

    // Application arguments are identifier-led or parenthesized; singleton
    // and structural forms need parens there, or they swallow the `=` of an
    // enclosing definition.
    bool starts_type_atom() const {
        const Token& t = peek();
        return t.kind == TokKind::Ident || t.is_punct("(");
    }

    TypePtr type_atom() {
        Loc loc = peek().loc;
        if (peek().kind == TokKind::Ident) {
            std::string name = advance().text;
            if (name == "int") return make_int_type(loc);
            if (name == "string") return make_string_type(loc);
            if (tyvar_in_scope(name)) return make_type_var(name, loc);
            return make_nominal(name, {}, loc);
        }
        if (peek().kind == TokKind::CapIdent) return structural_type();
        if (eat_punct("=")) return make_singleton_name(expect_ident(), loc);
        if (peek().is_punct("(")) return paren_type();
        fail("expected a type");
    }

    TypePtr structural_type() {
        Loc loc = peek().loc;
        std::string ctor = expect_cap_ident();
        std::vector<StructField> fields;
        if (eat_punct("{")) {
            while (!peek().is_punct("}")) {
                StructField f;
                Loc floc = peek().loc;
                f.name = expect_ident();
                if (eat_punct(":")) {
                    f.type = type();
                } else if (eat_punct("=")) {
                    f.type = make_singleton_name(expect_ident(), floc);
                } else {
                    fail("expected `:` or `=` in field");
                }
                fields.push_back(std::move(f));
                if (!eat_punct(";")) break;
            }
            expect_punct("}");
        }
        return make_structural(std::move(ctor), std::move(fields), loc);
    }

    /// Parses `( ... )` forms: grouping, tuple types, bar types, and arrow
    /// domains (decided by a trailing `->`).
    TypePtr paren_type() {
        Loc loc = peek().loc;
        expect_punct("(");
        std::vector<ArrowParam> elems;
        bool has_named = false;
        if (!peek().is_punct(")")) {
            elems.push_back(paren_element(has_named));
            if (peek().is_punct("|")) {
                if (has_named || elems[0].consumed)
                    fail("permissions cannot follow a binder");
                advance();
                std::vector<PermAtomExpr> perms;
                perms.push_back(perm_atom());
                while (eat_punct("*")) perms.push_back(perm_atom());
                expect_punct(")");
                return make_bar(elems[0].type, std::move(perms), loc);
            }
            while (eat_punct(",")) elems.push_back(paren_element(has_named));
        }
        expect_punct(")");
        if (peek().is_punct("->")) {
            advance();
            return make_arrow(std::move(elems), type(), loc);
        }
        if (has_named || elems.empty())
            fail("expected `->` after a parameter list");
        for (const auto& e : elems)
            if (e.consumed) fail("expected `->` after a parameter list");
        if (elems.size() == 1) return elems[0].type;
        std::vector<TypePtr> comps;
        comps.reserve(elems.size());
        for (auto& e : elems) comps.push_back(std::move(e.type));
        return make_tuple_type(std::move(comps), loc);
    }

    ArrowParam paren_element(bool& has_named) {
        ArrowParam p;
        p.consumed = eat_kw("consumes");
        if (peek().kind == TokKind::Ident && peek(1).is_punct(":")) {
            p.binder = advance().text;
            advance(); // ':'
            has_named = true;
        }
        p.type = type();
        return p;
    }

    PermAtomExpr perm_atom() {
        PermAtomExpr a;
        a.subject_name = expect_ident();
        expect_punct("@");
        a.type = type();
        return a;
    }

    // ---- declarations ----------------------------------------------------

    DataDecl data_decl() {
        DataDecl d;
        d.loc = peek().loc;
        expect_kw("data");
        d.is_mutable = eat_kw("mutable");
        d.name = expect_ident();
        while (peek().kind == TokKind::Ident) d.params.push_back(advance().text);
        expect_punct("=");
        tyvars_.push_back({d.params.begin(), d.params.end()});
        eat_punct("|");
        d.branches.push_back(data_branch());
        while (eat_punct("|")) d.branches.push_back(data_branch());
        tyvars_.pop_back();
        return d;
    }

    DataBranch data_branch() {
        DataBranch b;
        b.loc = peek().loc;
        b.ctor = expect_cap_ident();
        if (eat_punct("{")) {
            while (!peek().is_punct("}")) {
                StructField f;
                f.name = expect_ident();
                expect_punct(":");
                f.type = type();
                b.fields.push_back(std::move(f));
                if (!eat_punct(";")) break;
            }
            expect_punct("}");
        }
        return b;
    }

    ValGroup val_group() {
        ValGroup g;
        expect_kw("val");
        g.is_rec = eat_kw("rec");
        g.defs.push_back(val_def());
        while (eat_kw("and")) g.defs.push_back(val_def());
        return g;
    }

    ValDef val_def() {
        ValDef d;
        d.loc = peek().loc;
        d.name = expect_ident();
        if (peek().is_punct("[")) {
            advance();
            d.typarams.push_back(expect_ident());
            while (eat_punct(",")) d.typarams.push_back(expect_ident());
            expect_punct("]");
        }
        tyvars_.push_back({d.typarams.begin(), d.typarams.end()});
        if (peek().is_punct("(")) {
            advance();
            std::vector<ArrowParam> params;
            while (!peek().is_punct(")")) {
                ArrowParam p;
                p.consumed = eat_kw("consumes");
                p.binder = expect_ident();
                expect_punct(":");
                p.type = type();
                params.push_back(std::move(p));
                if (!eat_punct(",")) break;
            }
            expect_punct(")");
            d.params = std::move(params);
        }
        if (eat_punct(":")) d.ret = type();
        tyvars_.pop_back();
        expect_punct("=");
        if (d.is_function() && !d.ret) fail("a function definition needs a return type");
        d.body = expr();
        return d;
    }

    // ---- expressions -----------------------------------------------------

    std::shared_ptr<Expr> node(Expr::Kind k, Loc loc) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->loc = loc;
        return e;
    }

    ExprPtr expr() {
        Loc loc = peek().loc;
        if (peek().is_kw("let")) {
            advance();
            auto e = node(Expr::Kind::Let, loc);
            e->pattern.push_back(expect_ident());
            while (eat_punct(",")) e->pattern.push_back(expect_ident());
            expect_punct("=");
            e->rhs = expr();
            expect_kw("in");
            e->body = expr();
            return e;
        }
        if (peek().is_kw("match")) {
            advance();
            auto e = node(Expr::Kind::Match, loc);
            e->scrutinee = expr();
            expect_kw("with");
            while (peek().is_punct("|")) {
                advance();
                MatchBranch b;
                b.loc = peek().loc;
                b.ctor = expect_cap_ident();
                expect_punct("->");
                b.body = expr();
                e->branches.push_back(std::move(b));
            }
            if (e->branches.empty()) fail("a match needs at least one branch");
            expect_kw("end");
            return e;
        }
        if (peek().is_kw("if")) {
            advance();
            auto e = node(Expr::Kind::If, loc);
            e->scrutinee = expr();
            expect_kw("then");
            e->then_arm = expr();
            expect_kw("else");
            e->else_arm = expr();
            return e;
        }
        ExprPtr first = tuple_expr();
        if (eat_punct(";")) {
            auto e = node(Expr::Kind::Seq, loc);
            e->first = first;
            e->second = expr();
            return e;
        }
        return first;
    }

    ExprPtr tuple_expr() {
        Loc loc = peek().loc;
        ExprPtr first = app_expr();
        if (!peek().is_punct(",")) return first;
        auto e = node(Expr::Kind::Tuple, loc);
        e->items.push_back(first);
        while (eat_punct(",")) e->items.push_back(app_expr());
        return e;
    }

    ExprPtr app_expr() {
        Loc loc = peek().loc;
        ExprPtr e = atom_expr();
        for (;;) {
            if (peek().is_punct(".")) {
                advance();
                auto r = node(Expr::Kind::FieldRead, peek().loc);
                r->object = e;
                r->name = expect_ident();
                e = r;
                continue;
            }
            if (peek().is_punct("(") || peek().is_punct("[")) {
                auto c = node(Expr::Kind::Call, loc);
                c->object = e;
                if (eat_punct("[")) {
                    std::vector<TypePtr> targs;
                    targs.push_back(type());
                    while (eat_punct(",")) targs.push_back(type());
                    expect_punct("]");
                    c->type_args = std::move(targs);
                }
                expect_punct("(");
                while (!peek().is_punct(")")) {
                    c->items.push_back(app_expr());
                    if (!eat_punct(",")) break;
                }
                expect_punct(")");
                e = c;
                continue;
            }
            break;
        }
        if (peek().is_punct("<-")) {
            if (e->kind != Expr::Kind::FieldRead)
                fail("only a field can be assigned with `<-`");
            advance();
            auto w = node(Expr::Kind::FieldWrite, loc);
            w->object = e->object;
            w->name = e->name;
            w->written = app_expr();
            return w;
        }
        return e;
    }

    ExprPtr atom_expr() {
        Loc loc = peek().loc;
        if (peek().kind == TokKind::Ident) {
            auto e = node(Expr::Kind::Var, loc);
            e->name = advance().text;
            return e;
        }
        if (peek().kind == TokKind::IntLit) {
            auto e = node(Expr::Kind::IntLit, loc);
            e->int_value = std::stol(advance().text);
            return e;
        }
        if (peek().kind == TokKind::StrLit) {
            auto e = node(Expr::Kind::StrLit, loc);
            e->str_value = advance().text;
            return e;
        }
        if (peek().kind == TokKind::CapIdent) {
            auto e = node(Expr::Kind::CtorAlloc, loc);
            e->name = advance().text;
            if (eat_punct("{")) {
                while (!peek().is_punct("}")) {
                    std::string fname = expect_ident();
                    expect_punct("=");
                    e->field_inits.emplace_back(std::move(fname), app_expr());
                    if (!eat_punct(";")) break;
                }
                expect_punct("}");
            }
            return e;
        }
        if (eat_punct("(")) {
            ExprPtr e = expr();
            expect_punct(")");
            return e;
        }
        if (peek().is_kw("begin")) {
            advance();
            ExprPtr e = expr();
            expect_kw("end");
            return e;
        }
        if (peek().is_kw("let") || peek().is_kw("match") || peek().is_kw("if"))
            return expr();
        fail("expected an expression");
    }
};

// ---- let-normalization ----------------------------------------------------

struct Normalizer {
    int counter = 0;

    std::string fresh() { return "_a" + std::to_string(counter++); }

    using Bindings = std::vector<std::pair<std::string, ExprPtr>>;

    ExprPtr wrap(Bindings& binds, ExprPtr core) {
        for (auto it = binds.rbegin(); it != binds.rend(); ++it) {
            auto let = std::make_shared<Expr>();
            let->kind = Expr::Kind::Let;
            let->loc = it->second->loc;
            let->pattern.push_back(it->first);
            let->rhs = it->second;
            let->body = core;
            core = let;
        }
        return core;
    }

    /// Ensures `e` is a variable, hoisting a binding when it is not.
    ExprPtr atomic(const ExprPtr& e, Bindings& binds) {
        ExprPtr n = norm(e);
        if (n->kind == Expr::Kind::Var) return n;
        std::string name = fresh();
        binds.emplace_back(name, n);
        auto v = std::make_shared<Expr>();
        v->kind = Expr::Kind::Var;
        v->loc = e->loc;
        v->name = name;
        return v;
    }

    ExprPtr norm(const ExprPtr& e) {
        using K = Expr::Kind;
        switch (e->kind) {
        case K::Var:
        case K::IntLit:
        case K::StrLit:
            return e;
        case K::Tuple: {
            Bindings binds;
            auto out = std::make_shared<Expr>(*e);
            out->items.clear();
            for (const auto& item : e->items) out->items.push_back(atomic(item, binds));
            return wrap(binds, out);
        }
        case K::Let: {
            auto out = std::make_shared<Expr>(*e);
            out->rhs = norm(e->rhs);
            out->body = norm(e->body);
            return out;
        }
        case K::Match: {
            Bindings binds;
            auto out = std::make_shared<Expr>(*e);
            out->scrutinee = atomic(e->scrutinee, binds);
            out->branches.clear();
            for (const auto& b : e->branches)
                out->branches.push_back(MatchBranch{b.ctor, norm(b.body), b.loc});
            return wrap(binds, out);
        }
        case K::If: {
            Bindings binds;
            auto out = std::make_shared<Expr>(*e);
            out->scrutinee = atomic(e->scrutinee, binds);
            out->then_arm = norm(e->then_arm);
            out->else_arm = norm(e->else_arm);
            return wrap(binds, out);
        }
        case K::FieldRead: {
            Bindings binds;
            auto out = std::make_shared<Expr>(*e);
            out->object = atomic(e->object, binds);
            return wrap(binds, out);
        }
        case K::FieldWrite: {
            Bindings binds;
            auto out = std::make_shared<Expr>(*e);
            out->object = atomic(e->object, binds);
            out->written = atomic(e->written, binds);
            return wrap(binds, out);
        }
        case K::Call: {
            Bindings binds;
            auto out = std::make_shared<Expr>(*e);
            out->object = atomic(e->object, binds);
            out->items.clear();
            for (const auto& arg : e->items) out->items.push_back(atomic(arg, binds));
            return wrap(binds, out);
        }
        case K::CtorAlloc: {
            Bindings binds;
            auto out = std::make_shared<Expr>(*e);
            out->field_inits.clear();
            for (const auto& [name, value] : e->field_inits)
                out->field_inits.emplace_back(name, atomic(value, binds));
            return wrap(binds, out);
        }
        case K::Seq: {
            auto out = std::make_shared<Expr>(*e);
            out->first = norm(e->first);
            out->second = norm(e->second);
            return out;
        }
        }
        return e;
    }
};

} // namespace

Ast parse_program(const std::vector<Token>& toks, const std::string& file) {
    Parser p(toks, file);
    Ast ast = p.program();
    for (auto& decl : ast.decls) {
        if (auto* group = std::get_if<ValGroup>(&decl)) {
            for (auto& def : group->defs) {
                Normalizer n;
                def.body = n.norm(def.body);
            }
        }
    }
    return ast;
}

Ast parse_source(const std::string& source, const std::string& file) {
    return parse_program(lex(source, file), file);
}

TypePtr parse_standalone_type(const std::vector<Token>& toks, const std::string& file) {
    Parser p(toks, file);
    return p.standalone_type();
}

TypePtr parse_type_source(const std::string& source, const std::string& file) {
    return parse_standalone_type(lex(source, file), file);
}

} // namespace mezzo
