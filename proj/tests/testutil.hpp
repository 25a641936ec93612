#pragma once

// Shared helpers for building relations and random fixtures in tests.

#include <random>
#include <string>
#include <vector>

#include "ro/relalg.hpp"

namespace ro::testutil {

using relalg::RelationValue;
using relalg::Scheme;
using relalg::Tuple;

inline Scheme scheme_of(std::vector<std::pair<std::string, ScalarType>> cols) {
    Scheme s;
    for (auto& [n, t] : cols) s.add(AttrName{n}, t);
    return s;
}

inline RelationValue rel(Scheme s, std::vector<Tuple> rows) {
    return RelationValue(std::move(s), std::move(rows));
}

inline ScalarValue I(std::int64_t x) { return ScalarValue::of_int(x); }
inline ScalarValue S(std::string x) { return ScalarValue::of_string(std::move(x)); }
inline ScalarValue B(bool x) { return ScalarValue::of_bool(x); }
inline ScalarValue U() { return ScalarValue::undefined(); }
inline ScalarValue O(std::uint64_t x) { return ScalarValue::of_oid(Oid{x}); }

/// Random small relation over int columns named x0..x{n-1}, values in a
/// narrow range so collisions (hence dedup, joins) actually happen.
inline RelationValue random_int_relation(std::mt19937_64& rng, int max_cols = 3,
                                         int max_rows = 8) {
    std::uniform_int_distribution<int> ncols(1, max_cols), nrows(0, max_rows), val(0, 4);
    int c = ncols(rng);
    Scheme s;
    for (int i = 0; i < c; ++i) s.add(AttrName{"x" + std::to_string(i)}, ScalarType::integer());
    std::vector<Tuple> rows;
    int r = nrows(rng);
    for (int i = 0; i < r; ++i) {
        Tuple t;
        for (int j = 0; j < c; ++j) t.push_back(I(val(rng)));
        rows.push_back(std::move(t));
    }
    return RelationValue(std::move(s), std::move(rows));
}

/// Random relation with a fixed scheme.
inline RelationValue random_relation_with_scheme(std::mt19937_64& rng, const Scheme& s,
                                                 int max_rows = 8, bool allow_undefined = false) {
    std::uniform_int_distribution<int> nrows(0, max_rows), val(0, 4), coin(0, 9);
    std::vector<Tuple> rows;
    int r = nrows(rng);
    for (int i = 0; i < r; ++i) {
        Tuple t;
        for (const auto& [name, type] : s.attrs) {
            if (allow_undefined && coin(rng) == 0) {
                t.push_back(U());
                continue;
            }
            switch (type.kind) {
            case TypeKind::Integer: t.push_back(I(val(rng))); break;
            case TypeKind::Float: t.push_back(ScalarValue::of_float(val(rng) * 0.5)); break;
            case TypeKind::String: t.push_back(S("s" + std::to_string(val(rng)))); break;
            case TypeKind::Boolean: t.push_back(B(val(rng) % 2 == 0)); break;
            case TypeKind::Date:
                t.push_back(ScalarValue::of_date(Date{1 + val(rng), 1, 2005}));
                break;
            case TypeKind::Ref: t.push_back(O(1 + val(rng))); break;
            }
        }
        rows.push_back(std::move(t));
    }
    Scheme bare;
    bare.attrs = s.attrs;
    return RelationValue(std::move(bare), std::move(rows));
}

} // namespace ro::testutil
