#include "ro/session.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ro/dump.hpp"
#include "ro/parser.hpp"
#include "ro/rvars.hpp"

namespace ro::cli {

namespace {

std::pair<std::string, std::size_t> word_at(const std::string& text, std::size_t j) {
    std::string w;
    while (j < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        w.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(text[j]))));
        ++j;
    }
    return {w, j};
}

std::size_t skip_blank(const std::string& text, std::size_t j) {
    while (j < text.size()) {
        if (std::isspace(static_cast<unsigned char>(text[j]))) {
            ++j;
        } else if (text[j] == '/' && j + 1 < text.size() && text[j + 1] == '/') {
            while (j < text.size() && text[j] != '\n') ++j;
        } else {
            break;
        }
    }
    return j;
}

} // namespace

SplitResult split_input(const std::string& text, int first_line) {
    SplitResult r;
    r.rest_line = first_line;
    std::size_t i = 0;
    const std::size_t n = text.size();
    int line = first_line;
    std::size_t start = 0;
    int start_line = first_line;
    bool seen = false;
    int depth = 0;  // BEGIN...END nesting
    int braces = 0; // type-body nesting

    while (i < n) {
        char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '/') {
            while (i < n && text[i] != '\n') ++i;
            continue;
        }
        if (!seen) {
            seen = true;
            start = i;
            start_line = line;
            depth = 0;
            braces = 0;
            if (c == '\\') {
                std::size_t j = i;
                while (j < n && text[j] != '\n') ++j;
                r.complete.push_back({text.substr(i, j - i), line});
                seen = false;
                i = j;
                continue;
            }
        }
        if (c == '"') {
            ++i;
            while (i < n && text[i] != '"') {
                if (text[i] == '\\' && i + 1 < n) {
                    i += 2;
                } else {
                    if (text[i] == '\n') ++line;
                    ++i;
                }
            }
            if (i < n) ++i;
            continue;
        }
        if (c == '#') {
            ++i;
            while (i < n && text[i] != '#') {
                if (text[i] == '\n') ++line;
                ++i;
            }
            if (i < n) ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            auto [w, j] = word_at(text, i);
            if (w == "BEGIN") {
                // BEGIN TRANSACTION is a command of its own, not a block.
                auto [next, _] = word_at(text, skip_blank(text, j));
                if (next != "TRANSACTION") ++depth;
            } else if (w == "END") {
                if (depth > 0) --depth;
            }
            i = j;
            continue;
        }
        if (c == '{') {
            ++braces;
            ++i;
            continue;
        }
        if (c == '}') {
            if (braces > 0) --braces;
            ++i;
            continue;
        }
        if (c == ';' && depth == 0 && braces == 0) {
            ++i;
            r.complete.push_back({text.substr(start, i - start), start_line});
            seen = false;
            continue;
        }
        ++i;
    }
    if (seen) {
        r.rest = text.substr(start);
        r.rest_line = start_line;
    }
    return r;
}

namespace {

std::string header_of(const AttrName& a, const ScalarType& t) {
    if (a == oid_attr())
        return t.ref_target == "Object" ? "Object" : "Object(" + t.ref_target + ")";
    if (a == val_attr()) return "value";
    return a.display();
}

std::string rstrip(std::string s) {
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

std::string vt_display(const typesys::ValueType& v) {
    std::string base = v.is_tuple ? v.tuple_name : type_display(v.scalar);
    return v.is_set ? "SET OF " + base : base;
}

} // namespace

std::string format_relation(const relalg::RelationValue& rel) {
    const relalg::Scheme& s = rel.scheme();
    std::ostringstream os;
    const std::size_t nc = s.attrs.size();
    if (nc == 0) {
        os << "(" << rel.size() << (rel.size() == 1 ? " row)\n" : " rows)\n");
        return os.str();
    }
    std::vector<std::string> head(nc);
    std::vector<std::size_t> width(nc);
    for (std::size_t i = 0; i < nc; ++i) {
        head[i] = header_of(s.attrs[i].first, s.attrs[i].second);
        width[i] = head[i].size();
    }
    std::vector<std::vector<std::string>> cells;
    cells.reserve(rel.size());
    for (const auto& t : rel.tuples()) {
        std::vector<std::string> row(nc);
        for (std::size_t i = 0; i < nc; ++i) {
            row[i] = t[i].display();
            width[i] = std::max(width[i], row[i].size());
        }
        cells.push_back(std::move(row));
    }
    auto emit = [&](const std::vector<std::string>& row) {
        std::string ln;
        for (std::size_t i = 0; i < nc; ++i) {
            if (i) ln += "|";
            ln += " " + row[i] + std::string(width[i] - row[i].size() + 1, ' ');
        }
        os << rstrip(std::move(ln)) << "\n";
    };
    emit(head);
    std::string sep;
    for (std::size_t i = 0; i < nc; ++i) {
        if (i) sep += "+";
        sep += std::string(width[i] + 2, '-');
    }
    os << sep << "\n";
    for (const auto& row : cells) emit(row);
    os << "(" << rel.size() << (rel.size() == 1 ? " row)\n" : " rows)\n");
    return os.str();
}

Session::Session(std::ostream& out, std::ostream& err, SessionOptions opt)
    : out_(out), err_(err), opt_(opt) {}

void Session::print_result(const engine::CommandResult& r) {
    for (const auto& m : r.messages) out_ << "warning: " << m << "\n";
    if (r.has_relation) out_ << format_relation(r.relation);
}

bool Session::run_chunk(const Chunk& c, const std::string& source) {
    try {
        if (opt_.echo) out_ << c.text << "\n";
        if (!c.text.empty() && c.text[0] == '\\') {
            meta(c.text);
            return true;
        }
        for (const auto& cmd : lang::parse_commands(c.text)) print_result(eng_.execute(*cmd));
        return true;
    } catch (const Error& e) {
        if (source.empty())
            err_ << e.what() << "\n";
        else
            err_ << source << ":" << c.line << ": " << e.what() << "\n";
        return false;
    }
}

void Session::meta(const std::string& line) {
    std::istringstream in(line);
    std::string cmd, arg;
    in >> cmd;
    std::getline(in, arg);
    std::size_t b = arg.find_first_not_of(" \t");
    arg = b == std::string::npos ? "" : rstrip(arg.substr(b));
    auto need_arg = [&](const char* what) {
        if (arg.empty()) throw Error(ErrorCode::UsageError, cmd + " needs " + what);
    };
    if (cmd == "\\q" || cmd == "\\quit") {
        done_ = true;
    } else if (cmd == "\\d") {
        need_arg("a type or variable name");
        describe(arg);
    } else if (cmd == "\\dump") {
        need_arg("a file path");
        if (eng_.in_transaction())
            throw Error(ErrorCode::UsageError, "cannot dump inside a transaction");
        dump::save_file(eng_.db(), arg);
        out_ << "dumped to " << arg << "\n";
    } else if (cmd == "\\load") {
        need_arg("a file path");
        if (eng_.in_transaction())
            throw Error(ErrorCode::UsageError, "cannot load inside a transaction");
        eng_.db() = dump::load_file(arg);
        out_ << "loaded " << arg << "\n";
    } else if (cmd == "\\help" || cmd == "\\?") {
        out_ << "\\d <name>      describe a type or global variable\n"
             << "\\dump <path>   write the database to a file\n"
             << "\\load <path>   replace the database from a file\n"
             << "\\q             quit\n";
    } else {
        throw Error(ErrorCode::UsageError, "unknown meta-command '" + cmd + "'");
    }
}

void Session::describe(const std::string& name) const {
    const storage::Database& db = eng_.db();
    if (const auto* tt = db.types.find_tuple(name)) {
        out_ << "TUPLE " << name << " (";
        for (std::size_t i = 0; i < tt->attrs.size(); ++i) {
            if (i) out_ << ", ";
            out_ << tt->attrs[i].first << ":" << type_display(tt->attrs[i].second);
        }
        out_ << ")\n";
        return;
    }
    if (db.types.find_class(name)) {
        const auto& cls = db.types.require_class(name);
        out_ << "CLASS " << name;
        for (std::size_t i = 0; i < cls.parents.size(); ++i)
            out_ << (i ? ", " : " EXTENDS ") << cls.parents[i];
        out_ << "\n";
        for (const auto& ec : db.types.effective_components(name)) {
            const auto& spec = ec.spec;
            auto impl = db.types.lookup_realization(name, spec.name);
            std::string tag;
            if (!impl) {
                tag = "unrealized";
            } else {
                switch (impl->first.kind) {
                case typesys::ComponentImpl::Kind::Stored: tag = "stored"; break;
                case typesys::ComponentImpl::Kind::Computed: tag = "computed"; break;
                case typesys::ComponentImpl::Kind::Method: tag = "method"; break;
                }
                if (impl->second != name) tag += " at " + impl->second;
            }
            if (spec.is_method) {
                out_ << "  " << spec.name << "(";
                for (std::size_t i = 0; i < spec.params.size(); ++i) {
                    if (i) out_ << ", ";
                    out_ << spec.params[i].first << ":" << vt_display(spec.params[i].second);
                }
                out_ << ")";
                if (spec.has_value) out_ << " -> " << vt_display(spec.value);
                out_ << "  [" << tag << "]\n";
                continue;
            }
            relalg::Scheme cs = db.types.component_scheme(name, spec.name);
            out_ << "  " << name << "." << spec.name << " (Object(" << name << ")";
            for (const auto& [a, t] : cs.attrs) out_ << ", " << a.display() << ":" << type_display(t);
            out_ << ")";
            relalg::KeySpec key = rvars::derive_rvar_key(db.types, name, spec.name);
            out_ << (key.kind == relalg::KeyKind::Global ? "  GLOBAL KEY (" : "  KEY (");
            for (std::size_t i = 0; i < key.fields.size(); ++i) {
                if (i) out_ << ", ";
                out_ << (key.fields[i] == oid_attr() ? "Object(" + name + ")"
                                                     : key.fields[i].display());
            }
            out_ << ")  [" << tag << "]\n";
        }
        return;
    }
    auto g = db.globals.find(name);
    if (g != db.globals.end()) {
        const storage::GlobalVar& gv = g->second;
        out_ << "VAR " << name << " : " << vt_display(gv.type);
        if (gv.type.is_tuple) out_ << "  " << gv.value.scheme().display();
        for (const auto& k : gv.keys) {
            out_ << (k.kind == relalg::KeyKind::Global ? "  GLOBAL KEY (" : "  KEY (");
            for (std::size_t i = 0; i < k.fields.size(); ++i)
                out_ << (i ? ", " : "") << k.fields[i].display();
            out_ << ")";
        }
        out_ << "\n";
        return;
    }
    throw Error(ErrorCode::UnknownName, "no type or variable named '" + name + "'");
}

int Session::run_text(const std::string& text, const std::string& source) {
    SplitResult sr = split_input(text);
    for (const Chunk& c : sr.complete) {
        if (done_) return 0;
        bool was_tx = eng_.in_transaction();
        if (!run_chunk(c, source)) {
            if (was_tx && eng_.in_transaction()) {
                err_ << source << ":" << c.line << ": rolling back open transaction\n";
                eng_.execute(*lang::parse_command("ROLLBACK;"));
                continue;
            }
            return 1;
        }
    }
    if (!sr.rest.empty()) {
        err_ << source << ":" << sr.rest_line << ": incomplete command at end of input\n";
        return 1;
    }
    return 0;
}

int Session::run_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) {
        err_ << error_code_name(ErrorCode::IoError) << ": cannot read '" << path << "'\n";
        return 1;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return run_text(ss.str(), path);
}

void Session::repl(std::istream& in) {
    std::string pending, line;
    while (!done_) {
        out_ << (pending.empty() ? "ro> " : "  > ") << std::flush;
        if (!std::getline(in, line)) break;
        pending += line;
        pending += '\n';
        SplitResult sr = split_input(pending);
        pending = sr.rest;
        for (const Chunk& c : sr.complete) {
            if (done_) break;
            run_chunk(c, "");
        }
    }
}

} // namespace ro::cli
