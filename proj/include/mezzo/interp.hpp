#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mezzo/ast.hpp"
#include "mezzo/diagnostics.hpp"

namespace mezzo {

/// Raised by the evaluator; unreachable for programs the checker accepted,
/// observable through the CLI's --unchecked mode.
struct RuntimeFault : std::runtime_error {
    std::string kind; // wrong-tag | missing-field | immutable-write | unbound | non-block-access
    Loc loc;
    RuntimeFault(std::string k, Loc l, const std::string& msg)
        : std::runtime_error(msg), kind(std::move(k)), loc(l) {}
};

using BlockId = int;

struct Value {
    enum class Kind { Int, Str, Tuple, Addr, Fn };
    Kind kind = Kind::Int;
    long i = 0;
    std::string s;              // Str payload
    std::vector<Value> items;   // Tuple components
    BlockId addr = -1;          // Addr payload
    std::string fn_name;        // Fn payload
};

/// One tagged heap block; fields keep declaration order.
struct Block {
    std::string tag;
    bool is_mutable = false;
    std::vector<std::pair<std::string, Value>> fields;
};

struct Heap {
    std::vector<Block> blocks;
};

struct RunResult {
    Value value;
    Heap heap;
};

/// Evaluates every top-level value in order, then the entry point: either a
/// zero-parameter function (called) or a plain value (returned).
RunResult eval_program(const Ast& ast, const std::string& entry,
                       const std::string& file = "");

std::string print_value(const Value& v, const Heap& heap);

/// Reference behavior for splitting a value multiset at pivot k:
/// (sorted values <= k, sorted values > k).
std::pair<std::vector<long>, std::vector<long>> partition_oracle(
    std::vector<long> values, long k);

} // namespace mezzo
