#include "mezzo/driver.hpp"

#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#include "mezzo/checker.hpp"
#include "mezzo/diagnostics.hpp"
#include "mezzo/interp.hpp"
#include "mezzo/parser.hpp"

namespace mezzo {

namespace {

struct FileOutcome {
    std::vector<Diagnostic> diags;
    bool parse_failed = false;
    bool dump_requested = false;
    bool dump_hit = false;
    std::string dump_text;
};

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

FileOutcome check_one(const std::string& path, std::optional<int> dump_line) {
    FileOutcome out;
    out.dump_requested = dump_line.has_value();
    std::string src;
    if (!read_file(path, src)) {
        out.diags.push_back(
            {path, Loc{1, 1}, DiagCode::EParse, "cannot read file"});
        out.parse_failed = true;
        return out;
    }
    try {
        Ast ast = parse_source(src, path);
        DumpRequest dr;
        dr.line = dump_line.value_or(0);
        CheckResult cr = check_program(ast, path, dump_line ? &dr : nullptr);
        out.diags = std::move(cr.diagnostics);
        out.dump_hit = dr.hit;
        out.dump_text = std::move(dr.text);
    } catch (const SyntaxError& se) {
        out.diags.push_back(se.diag);
        out.parse_failed = true;
    }
    return out;
}

/// Splits "FILE:LINE"; returns false on a malformed spec.
bool parse_dump_spec(const std::string& spec, std::string& file, int& line) {
    auto pos = spec.rfind(':');
    if (pos == std::string::npos || pos + 1 >= spec.size()) return false;
    file = spec.substr(0, pos);
    try {
        line = std::stoi(spec.substr(pos + 1));
    } catch (...) {
        return false;
    }
    return line > 0;
}

} // namespace

int run_check(const CheckConfig& cfg, std::ostream& out, std::ostream& err) {
    std::string dump_file;
    int dump_line = 0;
    if (cfg.dump_perms &&
        !parse_dump_spec(*cfg.dump_perms, dump_file, dump_line)) {
        err << "mezzo: --dump-perms wants FILE:LINE, got " << *cfg.dump_perms
            << "\n";
        return 2;
    }

    std::vector<std::future<FileOutcome>> futures;
    futures.reserve(cfg.files.size());
    for (const auto& path : cfg.files) {
        std::optional<int> want;
        if (cfg.dump_perms && path == dump_file) want = dump_line;
        futures.push_back(
            std::async(std::launch::async, check_one, path, want));
    }

    bool any_parse_failure = false;
    bool any_error = false;
    std::vector<Diagnostic> all;
    for (size_t i = 0; i < futures.size(); ++i) {
        FileOutcome fo = futures[i].get();
        any_parse_failure |= fo.parse_failed;
        for (auto& d : fo.diags) {
            any_error |= diag_is_error(d.code);
            if (cfg.format == "human") err << format_human(d, cfg.color) << "\n";
            all.push_back(std::move(d));
        }
        if (fo.dump_requested) {
            if (fo.dump_hit) {
                out << "permissions at " << *cfg.dump_perms << ":\n"
                    << "  " << fo.dump_text << "\n";
            } else {
                err << "mezzo: no expression found at " << *cfg.dump_perms
                    << "\n";
            }
        }
    }
    if (cfg.format == "json") out << diagnostics_to_json(all) << "\n";

    if (any_parse_failure) return 2;
    return any_error ? 1 : 0;
}

int run_exec(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::string src;
    if (!read_file(cfg.file, src)) {
        err << format_human(
                   {cfg.file, Loc{1, 1}, DiagCode::EParse, "cannot read file"},
                   cfg.color)
            << "\n";
        return 2;
    }
    Ast ast;
    try {
        ast = parse_source(src, cfg.file);
    } catch (const SyntaxError& se) {
        err << format_human(se.diag, cfg.color) << "\n";
        return 2;
    }
    if (!cfg.unchecked) {
        CheckResult cr = check_program(ast, cfg.file);
        for (const auto& d : cr.diagnostics)
            err << format_human(d, cfg.color) << "\n";
        if (!cr.ok) return 1;
    }
    try {
        RunResult r = eval_program(ast, cfg.entry, cfg.file);
        out << print_value(r.value, r.heap) << "\n";
        return 0;
    } catch (const RuntimeFault& rf) {
        err << "runtime fault: " << rf.kind << ": " << rf.what() << "\n";
        return 3;
    }
}

} // namespace mezzo
