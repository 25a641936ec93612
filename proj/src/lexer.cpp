#include "ro/lexer.hpp"

#include <cctype>

#include "ro/error.hpp"

namespace ro::lang {

namespace {

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '~';
}
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

[[noreturn]] void fail(int line, int col, const std::string& msg) {
    throw Error(ErrorCode::SyntaxError,
                "line " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

} // namespace

std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    auto push = [&](Tok kind, int l, int c) {
        Token t;
        t.kind = kind;
        t.line = l;
        t.col = c;
        out.push_back(std::move(t));
        return &out.back();
    };

    while (i < text.size()) {
        char c = text[i];
        int l = line, cc = col;
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i + (c == '~' ? 1 : 0);
            if (c == '~' && (j >= text.size() || !ident_start(text[j]) || text[j] == '~'))
                fail(l, cc, "stray '~'");
            while (j < text.size() && ident_char(text[j])) ++j;
            if (j < text.size() && text[j] == '*') ++j; // adjacent star is part of the name
            auto* t = push(Tok::Ident, l, cc);
            t->text = text.substr(i, j - i);
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            bool is_float = false;
            if (j + 1 < text.size() && text[j] == '.' &&
                std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
                is_float = true;
                ++j;
                while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            }
            std::string num = text.substr(i, j - i);
            if (is_float) {
                auto* t = push(Tok::FloatLit, l, cc);
                t->fval = std::stod(num);
            } else {
                auto* t = push(Tok::IntLit, l, cc);
                try {
                    t->ival = std::stoll(num);
                } catch (const std::out_of_range&) {
                    fail(l, cc, "integer literal out of range");
                }
            }
            advance(j - i);
            continue;
        }
        if (c == '"') {
            std::string s;
            std::size_t j = i + 1;
            while (j < text.size() && text[j] != '"') {
                if (text[j] == '\\' && j + 1 < text.size()) {
                    char e = text[j + 1];
                    s.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
                    j += 2;
                } else {
                    s.push_back(text[j]);
                    ++j;
                }
            }
            if (j >= text.size()) fail(l, cc, "unterminated string literal");
            auto* t = push(Tok::StringLit, l, cc);
            t->text = std::move(s);
            advance(j + 1 - i);
            continue;
        }
        if (c == '#') {
            // #DD.MM.YYYY#
            std::size_t j = i + 1;
            auto digits = [&](int want_min, int want_max) -> int {
                std::size_t s = j;
                while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
                int n = static_cast<int>(j - s);
                if (n < want_min || n > want_max) fail(l, cc, "bad date literal");
                return std::stoi(text.substr(s, j - s));
            };
            Date d;
            d.day = digits(1, 2);
            if (j >= text.size() || text[j] != '.') fail(l, cc, "bad date literal");
            ++j;
            d.month = digits(1, 2);
            if (j >= text.size() || text[j] != '.') fail(l, cc, "bad date literal");
            ++j;
            d.year = digits(4, 4);
            if (j >= text.size() || text[j] != '#') fail(l, cc, "bad date literal");
            ++j;
            if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31)
                fail(l, cc, "date out of range");
            auto* t = push(Tok::DateLit, l, cc);
            t->dval = d;
            advance(j - i);
            continue;
        }
        auto two = [&](char n) { return i + 1 < text.size() && text[i + 1] == n; };
        switch (c) {
        case '(': push(Tok::LParen, l, cc); advance(1); break;
        case ')': push(Tok::RParen, l, cc); advance(1); break;
        case '{': push(Tok::LBrace, l, cc); advance(1); break;
        case '}': push(Tok::RBrace, l, cc); advance(1); break;
        case '[': push(Tok::LBracket, l, cc); advance(1); break;
        case ']': push(Tok::RBracket, l, cc); advance(1); break;
        case '<':
            if (two('=')) {
                push(Tok::Le, l, cc);
                advance(2);
            } else if (two('>')) {
                push(Tok::Ne, l, cc);
                advance(2);
            } else {
                push(Tok::Lt, l, cc);
                advance(1);
            }
            break;
        case '>':
            if (two('=')) {
                push(Tok::Ge, l, cc);
                advance(2);
            } else {
                push(Tok::Gt, l, cc);
                advance(1);
            }
            break;
        case '=': push(Tok::Eq, l, cc); advance(1); break;
        case '+': push(Tok::Plus, l, cc); advance(1); break;
        case '-': push(Tok::Minus, l, cc); advance(1); break;
        case '*': push(Tok::Star, l, cc); advance(1); break;
        case '/': push(Tok::Slash, l, cc); advance(1); break;
        case ',': push(Tok::Comma, l, cc); advance(1); break;
        case ';': push(Tok::Semi, l, cc); advance(1); break;
        case '.': push(Tok::Dot, l, cc); advance(1); break;
        case '!': push(Tok::Bang, l, cc); advance(1); break;
        case ':':
            if (two('=')) {
                push(Tok::Assign, l, cc);
                advance(2);
            } else {
                fail(l, cc, "expected ':=' after ':'");
            }
            break;
        case '\\':
            // REPL meta-commands are handled before the lexer; reject here.
            fail(l, cc, "unexpected '\\'");
        default:
            fail(l, cc, std::string("unexpected character '") + c + "'");
        }
    }
    Token end;
    end.kind = Tok::End;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

std::string token_name(Tok t) {
    switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::IntLit: return "integer literal";
    case Tok::FloatLit: return "float literal";
    case Tok::StringLit: return "string literal";
    case Tok::DateLit: return "date literal";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    case Tok::Le: return "'<='";
    case Tok::Ge: return "'>='";
    case Tok::Eq: return "'='";
    case Tok::Ne: return "'<>'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Dot: return "'.'";
    case Tok::Assign: return "':='";
    case Tok::Bang: return "'!'";
    }
    return "?";
}

} // namespace ro::lang
