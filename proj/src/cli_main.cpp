#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ro/dump.hpp"
#include "ro/session.hpp"

int main(int argc, char** argv) {
    CLI::App app{"object store shell: REPL, script runner, database dump/load"};
    std::string db_path;
    std::vector<std::string> scripts;
    std::uint64_t seed = 0;
    ro::cli::SessionOptions opt;
    auto* db_opt = app.add_option(
        "--db", db_path, "database file; loaded if present, written back on exit");
    app.add_option("--script", scripts, "script file to run (repeatable)");
    app.add_flag("--echo", opt.echo, "echo each command before its output");
    auto* seed_opt = app.add_option("--seed", seed, "seed for demo-data tooling");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int r = app.exit(e);
        return r == 0 ? 0 : 2;
    }
    if (seed_opt->count()) opt.seed = seed;
    if (db_opt->count()) {
        std::filesystem::path parent = std::filesystem::path(db_path).parent_path();
        if (!parent.empty() && !std::filesystem::is_directory(parent)) {
            std::cerr << "directory of --db path does not exist: " << parent << "\n";
            return 2;
        }
    }

    ro::cli::Session session(std::cout, std::cerr, opt);
    try {
        if (db_opt->count() && std::filesystem::exists(db_path))
            session.eng().db() = ro::dump::load_file(db_path);
    } catch (const ro::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    int status = 0;
    for (const std::string& p : scripts) {
        status = session.run_file(p);
        if (status != 0 || session.done()) break;
    }
    if (status == 0 && scripts.empty() && !session.done()) session.repl(std::cin);

    if (db_opt->count()) {
        try {
            ro::dump::save_file(session.eng().db(), db_path);
        } catch (const ro::Error& e) {
            std::cerr << e.what() << "\n";
            if (status == 0) status = 1;
        }
    }
    return status;
}
