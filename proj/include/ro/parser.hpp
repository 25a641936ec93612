#pragma once

#include <string>
#include <vector>

#include "ro/ast.hpp"

namespace ro::lang {

/// Parses a script: zero or more ';'-terminated commands. An ALTER CLASS with
/// several clauses expands into one command per clause.
std::vector<ast::CommandPtr> parse_commands(const std::string& text);

/// Parses exactly one command.
ast::CommandPtr parse_command(const std::string& text);

/// Parses a standalone query expression (whole input).
ast::ExprPtr parse_expr(const std::string& text);

/// Parses a statement sequence (method-body syntax, whole input).
std::vector<ast::StmtPtr> parse_statements(const std::string& text);

} // namespace ro::lang
