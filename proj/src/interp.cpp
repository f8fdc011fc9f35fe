#include "mezzo/interp.hpp"

#include <algorithm>

namespace mezzo {

namespace {

using EK = Expr::Kind;

struct CtorInfo {
    bool is_mutable = false;
    std::vector<std::string> field_order;
};

struct Interp {
    std::string file;
    std::map<std::string, const ValDef*> fns;
    std::map<std::string, CtorInfo> ctors;
    std::map<std::string, Value> globals;
    Heap heap;

    using Env = std::map<std::string, Value>;

    [[noreturn]] void fault(const std::string& kind, Loc loc, const std::string& msg) {
        throw RuntimeFault(kind, loc, msg);
    }

    Block& block_of(const Value& v, Loc loc, const std::string& what) {
        if (v.kind != Value::Kind::Addr)
            fault("non-block-access", loc, what + " needs a constructor value");
        if (v.addr < 0 || v.addr >= static_cast<BlockId>(heap.blocks.size()))
            fault("non-block-access", loc, "dangling block id");
        return heap.blocks[static_cast<size_t>(v.addr)];
    }

    long int_of(const Value& v, Loc loc, const std::string& what) {
        if (v.kind != Value::Kind::Int) fault("wrong-tag", loc, what + " needs an int");
        return v.i;
    }

    Value eval(Env& env, const ExprPtr& e) {
        switch (e->kind) {
        case EK::Var: {
            auto it = env.find(e->name);
            if (it != env.end()) return it->second;
            auto git = globals.find(e->name);
            if (git != globals.end()) return git->second;
            if (fns.count(e->name) || is_builtin(e->name)) {
                Value v;
                v.kind = Value::Kind::Fn;
                v.fn_name = e->name;
                return v;
            }
            fault("unbound", e->loc, "unbound variable " + e->name);
        }
        case EK::IntLit: {
            Value v;
            v.i = e->int_value;
            return v;
        }
        case EK::StrLit: {
            Value v;
            v.kind = Value::Kind::Str;
            v.s = e->str_value;
            return v;
        }
        case EK::Tuple: {
            Value v;
            v.kind = Value::Kind::Tuple;
            for (const auto& item : e->items) v.items.push_back(eval(env, item));
            return v;
        }
        case EK::Let: {
            Value rhs = eval(env, e->rhs);
            if (e->pattern.size() == 1) {
                env[e->pattern[0]] = std::move(rhs);
            } else {
                if (rhs.kind != Value::Kind::Tuple ||
                    rhs.items.size() != e->pattern.size())
                    fault("wrong-tag", e->loc, "destructuring a non-tuple");
                for (size_t i = 0; i < e->pattern.size(); ++i)
                    env[e->pattern[i]] = rhs.items[i];
            }
            return eval(env, e->body);
        }
        case EK::Seq: {
            eval(env, e->first);
            return eval(env, e->second);
        }
        case EK::If: {
            long c = int_of(eval(env, e->scrutinee), e->scrutinee->loc, "if condition");
            return eval(env, c != 0 ? e->then_arm : e->else_arm);
        }
        case EK::Match: {
            Value s = eval(env, e->scrutinee);
            const Block& b = block_of(s, e->loc, "match");
            for (const auto& br : e->branches)
                if (br.ctor == b.tag) return eval(env, br.body);
            fault("wrong-tag", e->loc, "no branch for constructor " + b.tag);
        }
        case EK::FieldRead: {
            Value o = eval(env, e->object);
            Block& b = block_of(o, e->loc, "field read");
            for (const auto& [n, v] : b.fields)
                if (n == e->name) return v;
            fault("missing-field", e->loc, b.tag + " has no field " + e->name);
        }
        case EK::FieldWrite: {
            Value o = eval(env, e->object);
            Value w = eval(env, e->written);
            Block& b = block_of(o, e->loc, "field write");
            if (!b.is_mutable)
                fault("immutable-write", e->loc, "write to immutable " + b.tag);
            for (auto& [n, v] : b.fields) {
                if (n == e->name) {
                    v = std::move(w);
                    return Value{};
                }
            }
            fault("missing-field", e->loc, b.tag + " has no field " + e->name);
        }
        case EK::CtorAlloc: {
            auto it = ctors.find(e->name);
            if (it == ctors.end())
                fault("unbound", e->loc, "unknown constructor " + e->name);
            std::map<std::string, Value> given;
            for (const auto& [n, init] : e->field_inits) given[n] = eval(env, init);
            Block b;
            b.tag = e->name;
            b.is_mutable = it->second.is_mutable;
            for (const auto& n : it->second.field_order) {
                auto g = given.find(n);
                if (g == given.end())
                    fault("missing-field", e->loc, e->name + " needs field " + n);
                b.fields.emplace_back(n, std::move(g->second));
            }
            heap.blocks.push_back(std::move(b));
            Value v;
            v.kind = Value::Kind::Addr;
            v.addr = static_cast<BlockId>(heap.blocks.size()) - 1;
            return v;
        }
        case EK::Call: {
            std::string name;
            if (e->object->kind == EK::Var) {
                const std::string& n = e->object->name;
                const Value* bound = nullptr;
                if (auto it = env.find(n); it != env.end()) bound = &it->second;
                else if (auto git = globals.find(n); git != globals.end())
                    bound = &git->second;
                if (bound) {
                    if (bound->kind != Value::Kind::Fn)
                        fault("non-block-access", e->loc, n + " is not a function");
                    name = bound->fn_name;
                } else {
                    name = n; // a direct function or builtin; call() checks
                }
            } else {
                Value f = eval(env, e->object);
                if (f.kind != Value::Kind::Fn)
                    fault("non-block-access", e->loc, "calling a non-function");
                name = f.fn_name;
            }
            std::vector<Value> args;
            for (const auto& item : e->items) args.push_back(eval(env, item));
            return call(name, std::move(args), e->loc);
        }
        }
        fault("unbound", e->loc, "unsupported expression");
    }

    static bool is_builtin(const std::string& n) {
        return n == "compare_int" || n == "add_int" || n == "leq_int";
    }

    Value call(const std::string& name, std::vector<Value> args, Loc loc) {
        if (is_builtin(name)) {
            if (args.size() != 2) fault("wrong-tag", loc, name + " takes 2 arguments");
            long a = int_of(args[0], loc, name);
            long b = int_of(args[1], loc, name);
            Value v;
            if (name == "compare_int") v.i = a < b ? -1 : (a > b ? 1 : 0);
            if (name == "add_int") v.i = a + b;
            if (name == "leq_int") v.i = a <= b ? 1 : 0;
            return v;
        }
        auto it = fns.find(name);
        if (it == fns.end()) fault("unbound", loc, "unbound function " + name);
        const ValDef& def = *it->second;
        if (args.size() != def.params->size())
            fault("wrong-tag", loc, name + " arity mismatch");
        Env env;
        for (size_t i = 0; i < args.size(); ++i) {
            const std::string& binder = (*def.params)[i].binder;
            env[binder.empty() ? "%arg" + std::to_string(i) : binder] =
                std::move(args[i]);
        }
        return eval(env, def.body);
    }
};

void collect(const Ast& ast, Interp& in) {
    for (const auto& decl : ast.decls) {
        if (const DataDecl* d = std::get_if<DataDecl>(&decl)) {
            for (const auto& b : d->branches) {
                CtorInfo info;
                info.is_mutable = d->is_mutable;
                for (const auto& f : b.fields) info.field_order.push_back(f.name);
                in.ctors[b.ctor] = std::move(info);
            }
        } else if (const ValGroup* g = std::get_if<ValGroup>(&decl)) {
            for (const auto& def : g->defs)
                if (def.is_function()) in.fns[def.name] = &def;
        }
    }
}

std::string escape(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') { out += "\\n"; continue; }
        out += c;
    }
    return out + "\"";
}

std::string print_rec(const Value& v, const Heap& heap, int depth) {
    if (depth > 16) return "...";
    switch (v.kind) {
    case Value::Kind::Int:
        return std::to_string(v.i);
    case Value::Kind::Str:
        return escape(v.s);
    case Value::Kind::Tuple: {
        std::string out = "(";
        for (size_t i = 0; i < v.items.size(); ++i) {
            if (i) out += ", ";
            out += print_rec(v.items[i], heap, depth + 1);
        }
        return out + ")";
    }
    case Value::Kind::Addr: {
        if (v.addr < 0 || v.addr >= static_cast<BlockId>(heap.blocks.size()))
            return "<bad-block>";
        const Block& b = heap.blocks[static_cast<size_t>(v.addr)];
        if (b.fields.empty()) return b.tag;
        std::string out = b.tag + " { ";
        for (size_t i = 0; i < b.fields.size(); ++i) {
            if (i) out += "; ";
            out += b.fields[i].first + " = " +
                   print_rec(b.fields[i].second, heap, depth + 1);
        }
        return out + " }";
    }
    case Value::Kind::Fn:
        return "<fun " + v.fn_name + ">";
    }
    return "<value>";
}

} // namespace

RunResult eval_program(const Ast& ast, const std::string& entry,
                       const std::string& file) {
    Interp in;
    in.file = file;
    collect(ast, in);

    // Top-level plain values run first, in program order.
    for (const auto& decl : ast.decls) {
        const ValGroup* g = std::get_if<ValGroup>(&decl);
        if (!g) continue;
        for (const auto& def : g->defs) {
            if (def.is_function()) continue;
            Interp::Env env;
            in.globals[def.name] = in.eval(env, def.body);
        }
    }

    RunResult out;
    auto git = in.globals.find(entry);
    if (git != in.globals.end()) {
        out.value = git->second;
    } else if (in.fns.count(entry)) {
        out.value = in.call(entry, {}, Loc{});
    } else {
        throw RuntimeFault("unbound", Loc{}, "no entry point named " + entry);
    }
    out.heap = std::move(in.heap);
    return out;
}

std::string print_value(const Value& v, const Heap& heap) {
    return print_rec(v, heap, 0);
}

std::pair<std::vector<long>, std::vector<long>> partition_oracle(
    std::vector<long> values, long k) {
    std::sort(values.begin(), values.end());
    std::vector<long> leq, gt;
    for (long v : values) (v <= k ? leq : gt).push_back(v);
    return {std::move(leq), std::move(gt)};
}

} // namespace mezzo
