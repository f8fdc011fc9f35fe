#include "mezzo/diagnostics.hpp"

#include <json.hpp>

namespace mezzo {

const char* diag_code_name(DiagCode code) {
    switch (code) {
    case DiagCode::EParse: return "E-PARSE";
    case DiagCode::EKind: return "E-KIND";
    case DiagCode::EMode: return "E-MODE";
    case DiagCode::ESubtract: return "E-SUBTRACT";
    case DiagCode::EReturn: return "E-RETURN";
    case DiagCode::EImmutWrite: return "E-IMMUT-WRITE";
    case DiagCode::EInstantiate: return "E-INSTANTIATE";
    case DiagCode::WDeadcode: return "W-DEADCODE";
    }
    return "E-PARSE";
}

bool parse_diag_code(const std::string& name, DiagCode& out) {
    static const DiagCode all[] = {
        DiagCode::EParse,      DiagCode::EKind,   DiagCode::EMode,
        DiagCode::ESubtract,   DiagCode::EReturn, DiagCode::EImmutWrite,
        DiagCode::EInstantiate, DiagCode::WDeadcode,
    };
    for (DiagCode c : all) {
        if (name == diag_code_name(c)) {
            out = c;
            return true;
        }
    }
    return false;
}

bool diag_is_error(DiagCode code) {
    return code != DiagCode::WDeadcode;
}

std::string format_human(const Diagnostic& d, bool color) {
    std::string sev = diag_is_error(d.code) ? "error" : "warning";
    if (color) {
        sev = diag_is_error(d.code) ? "\x1b[31merror\x1b[0m" : "\x1b[33mwarning\x1b[0m";
    }
    std::string out = d.file + ":" + std::to_string(d.loc.line) + ":" +
                      std::to_string(d.loc.column) + ": " + sev + "[" +
                      diag_code_name(d.code) + "]: " + d.message;
    for (const std::string& g : d.subgoals) {
        out += "\n  " + g;
    }
    return out;
}

std::string diagnostics_to_json(const std::vector<Diagnostic>& diags) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Diagnostic& d : diags) {
        nlohmann::json j;
        j["file"] = d.file;
        j["line"] = d.loc.line;
        j["column"] = d.loc.column;
        j["code"] = diag_code_name(d.code);
        j["message"] = d.message;
        if (!d.subgoals.empty()) {
            j["subgoals"] = d.subgoals;
        }
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

std::vector<Diagnostic> diagnostics_from_json(const std::string& text) {
    nlohmann::json arr = nlohmann::json::parse(text);
    std::vector<Diagnostic> out;
    for (const auto& j : arr) {
        Diagnostic d;
        d.file = j.at("file").get<std::string>();
        d.loc.line = j.at("line").get<int>();
        d.loc.column = j.at("column").get<int>();
        if (!parse_diag_code(j.at("code").get<std::string>(), d.code)) {
            throw std::runtime_error("unknown diagnostic code in JSON");
        }
        d.message = j.at("message").get<std::string>();
        if (j.contains("subgoals")) {
            d.subgoals = j.at("subgoals").get<std::vector<std::string>>();
        }
        out.push_back(std::move(d));
    }
    return out;
}

} // namespace mezzo
