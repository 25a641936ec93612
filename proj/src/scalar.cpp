#include "ro/scalar.hpp"

#include <bit>
#include <sstream>

namespace ro {

std::string type_display(const ScalarType& t) {
    switch (t.kind) {
    case TypeKind::Integer: return "INTEGER";
    case TypeKind::Float: return "FLOAT";
    case TypeKind::String: return "STRING";
    case TypeKind::Boolean: return "BOOLEAN";
    case TypeKind::Date: return "DATE";
    case TypeKind::Ref: return t.ref_target == "Object" ? "DOID" : t.ref_target;
    }
    return "?";
}

bool ScalarValue::fits(const ScalarType& t) const {
    if (is_undefined()) return true;
    switch (t.kind) {
    case TypeKind::Integer: return std::holds_alternative<std::int64_t>(v_);
    case TypeKind::Float: return std::holds_alternative<double>(v_);
    case TypeKind::String: return std::holds_alternative<std::string>(v_);
    case TypeKind::Boolean: return std::holds_alternative<bool>(v_);
    case TypeKind::Date: return std::holds_alternative<Date>(v_);
    case TypeKind::Ref: return std::holds_alternative<Oid>(v_);
    }
    return false;
}

namespace {

// Bit-level float identity: set semantics need a total, exact equality.
std::uint64_t float_bits(double d) { return std::bit_cast<std::uint64_t>(d); }

} // namespace

bool operator==(const ScalarValue& a, const ScalarValue& b) {
    if (a.v_.index() != b.v_.index()) return false;
    if (std::holds_alternative<double>(a.v_))
        return float_bits(std::get<double>(a.v_)) == float_bits(std::get<double>(b.v_));
    return a.v_ == b.v_;
}

std::strong_ordering operator<=>(const ScalarValue& a, const ScalarValue& b) {
    if (auto c = a.v_.index() <=> b.v_.index(); c != 0) return c;
    switch (a.v_.index()) {
    case 0: return std::strong_ordering::equal; // Undefined
    case 1: return std::get<std::int64_t>(a.v_) <=> std::get<std::int64_t>(b.v_);
    case 2: return float_bits(std::get<double>(a.v_)) <=> float_bits(std::get<double>(b.v_));
    case 3: return std::get<std::string>(a.v_) <=> std::get<std::string>(b.v_);
    case 4: return std::get<bool>(a.v_) <=> std::get<bool>(b.v_);
    case 5: return std::get<Date>(a.v_) <=> std::get<Date>(b.v_);
    case 6: return std::get<Oid>(a.v_) <=> std::get<Oid>(b.v_);
    }
    return std::strong_ordering::equal;
}

std::string ScalarValue::display() const {
    std::ostringstream os;
    switch (v_.index()) {
    case 0: os << "NULL"; break;
    case 1: os << std::get<std::int64_t>(v_); break;
    case 2: os << std::get<double>(v_); break;
    case 3: os << '"' << std::get<std::string>(v_) << '"'; break;
    case 4: os << (std::get<bool>(v_) ? "TRUE" : "FALSE"); break;
    case 5: {
        Date d = std::get<Date>(v_);
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02d.%02d.%04d#", d.day, d.month, d.year);
        os << buf;
        break;
    }
    case 6: os << "@" << std::get<Oid>(v_).value; break;
    }
    return os.str();
}

std::optional<std::strong_ordering> compare_for_predicate(const ScalarValue& a,
                                                          const ScalarValue& b) {
    if (a.is_undefined() || b.is_undefined()) return std::nullopt;
    if (a.storage().index() != b.storage().index()) return std::nullopt;
    return a <=> b;
}

std::string AttrName::display() const {
    std::string r;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (i) r += '.';
        r += segments[i];
    }
    return r;
}

const AttrName& oid_attr() {
    static const AttrName a{"#oid"};
    return a;
}
const AttrName& this_attr() {
    static const AttrName a{"#this"};
    return a;
}
const AttrName& val_attr() {
    static const AttrName a{"#val"};
    return a;
}
const AttrName& result_attr() {
    static const AttrName a{"result"};
    return a;
}

} // namespace ro
