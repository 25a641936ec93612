#pragma once

#include <string>

#include "ro/storage.hpp"

namespace ro::dump {

/// Deterministic JSON serialization of a whole database: type definitions
/// (realization bodies as canonical source text), the object table, base
/// variables, and global variables. Dumping a loaded dump reproduces the
/// file byte for byte.
std::string dump_database(const storage::Database& db);

/// Rebuilds a database from dump_database() output. Throws
/// FormatVersionMismatch for foreign versions and IntegrityCheckFailed for
/// malformed or inconsistent input.
storage::Database load_database(const std::string& text);

void save_file(const storage::Database& db, const std::string& path);
storage::Database load_file(const std::string& path);

} // namespace ro::dump
