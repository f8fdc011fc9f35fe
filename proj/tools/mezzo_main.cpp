#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"

#include "mezzo/driver.hpp"

#if defined(_WIN32)
#include <io.h>
#define MEZZO_ISATTY _isatty
#define MEZZO_FILENO _fileno
#else
#include <unistd.h>
#define MEZZO_ISATTY isatty
#define MEZZO_FILENO fileno
#endif

int main(int argc, char** argv) {
    CLI::App app{"mezzo: a permission-based type checker and interpreter"};
    app.require_subcommand(1);

    mezzo::CheckConfig ccfg;
    std::string dump_spec;
    auto* check = app.add_subcommand("check", "Type-check source files");
    check->add_option("files", ccfg.files, "Source files (.mz)")->required();
    check->add_option("--dump-perms", dump_spec,
                      "Print the permission environment at FILE:LINE");
    check->add_option("--format", ccfg.format, "Diagnostic format")
        ->check(CLI::IsMember({"human", "json"}))
        ->default_str("human");

    mezzo::RunConfig rcfg;
    auto* run = app.add_subcommand("run", "Check and execute a program");
    run->add_option("file", rcfg.file, "Source file (.mz)")->required();
    run->add_option("--entry", rcfg.entry, "Entry point name")
        ->default_str("main");
    run->add_flag("--unchecked", rcfg.unchecked,
                  "Skip the permission checker before running");

    CLI11_PARSE(app, argc, argv);

    bool color = std::getenv("NO_COLOR") == nullptr &&
                 MEZZO_ISATTY(MEZZO_FILENO(stderr));
    ccfg.color = color;
    rcfg.color = color;
    if (!dump_spec.empty()) ccfg.dump_perms = dump_spec;

    if (check->parsed()) return mezzo::run_check(ccfg, std::cout, std::cerr);
    return mezzo::run_exec(rcfg, std::cout, std::cerr);
}
