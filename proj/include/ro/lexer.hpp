#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ro/scalar.hpp"

namespace ro::lang {

enum class Tok {
    End,
    Ident,
    IntLit,
    FloatLit,
    StringLit,
    DateLit,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    Plus,
    Minus,
    Star,
    Slash,
    Comma,
    Semi,
    Dot,
    Assign, // :=
    Bang,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;       // Ident / StringLit payload
    std::int64_t ival = 0;  // IntLit
    double fval = 0;        // FloatLit
    Date dval;              // DateLit
    int line = 1;
    int col = 1;
};

/// Tokenizes the whole input. `//` starts a line comment. Identifiers may
/// carry an immediately adjacent trailing '*' (path wildcard-style names like
/// a* from the surface syntax are plain identifiers here); '*' separated by
/// whitespace is the multiplication token. Throws SyntaxError.
std::vector<Token> lex(const std::string& text);

std::string token_name(Tok t);

} // namespace ro::lang
