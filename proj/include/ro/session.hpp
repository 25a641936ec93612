#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ro/engine.hpp"

namespace ro::cli {

/// One ';'-terminated command (or one '\'-prefixed meta-command line) with
/// the line it starts on.
struct Chunk {
    std::string text;
    int line = 1;
};

/// Splits raw input into executable chunks. Semicolons inside string
/// literals, date literals, comments, and BEGIN...END blocks do not
/// terminate a command; `rest` carries a trailing incomplete command for the
/// REPL to keep accumulating.
struct SplitResult {
    std::vector<Chunk> complete;
    std::string rest;
    int rest_line = 1;
};
SplitResult split_input(const std::string& text, int first_line = 1);

/// Aligned table rendering. Rows are already in canonical order; OID columns
/// are headed Object(<type>), the scalar result column is headed "value".
std::string format_relation(const relalg::RelationValue& rel);

struct SessionOptions {
    bool echo = false;
    std::optional<std::uint64_t> seed; // reserved for demo-data tooling
};

/// One interactive or scripted session over one engine. The REPL and the
/// script runner share this dispatch path, so they accept exactly the same
/// input.
class Session {
  public:
    Session(std::ostream& out, std::ostream& err, SessionOptions opt = {});

    engine::Engine& eng() { return eng_; }
    bool done() const { return done_; }

    /// Executes one chunk, printing results to out and diagnostics to err.
    /// Returns false when the chunk failed.
    bool run_chunk(const Chunk& c, const std::string& source);

    /// Runs a whole script. The first error aborts with status 1, except
    /// that an error inside an open transaction rolls it back and the
    /// script continues.
    int run_text(const std::string& text, const std::string& source);
    int run_file(const std::string& path);

    /// Line-oriented loop: accumulates input until a command is complete,
    /// prints diagnostics and keeps going. Ends on \q or end of input.
    void repl(std::istream& in);

  private:
    engine::Engine eng_;
    std::ostream& out_;
    std::ostream& err_;
    SessionOptions opt_;
    bool done_ = false;

    void meta(const std::string& line);
    void describe(const std::string& name) const;
    void print_result(const engine::CommandResult& r);
};

} // namespace ro::cli
