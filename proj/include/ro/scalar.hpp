#pragma once

#include <cstdint>
#include <compare>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ro {

/// Opaque object identifier. Ordinals are assigned monotonically and never
/// reused within one database lifetime, including across dump/load.
struct Oid {
    std::uint64_t value = 0;

    friend bool operator==(const Oid&, const Oid&) = default;
    friend auto operator<=>(const Oid&, const Oid&) = default;
};

struct Date {
    int day = 0;
    int month = 0;
    int year = 0;

    friend bool operator==(const Date&, const Date&) = default;
    // Chronological order.
    friend std::strong_ordering operator<=>(const Date& a, const Date& b) {
        if (auto c = a.year <=> b.year; c != 0) return c;
        if (auto c = a.month <=> b.month; c != 0) return c;
        return a.day <=> b.day;
    }
};

enum class TypeKind { Integer, Float, String, Boolean, Date, Ref };

/// Scalar domain. Ref carries the name of the referenced object type; bare
/// object identifiers (the DOID domain) are Ref("Object").
struct ScalarType {
    TypeKind kind = TypeKind::Integer;
    std::string ref_target; // only for Ref

    static ScalarType integer() { return {TypeKind::Integer, {}}; }
    static ScalarType floating() { return {TypeKind::Float, {}}; }
    static ScalarType string() { return {TypeKind::String, {}}; }
    static ScalarType boolean() { return {TypeKind::Boolean, {}}; }
    static ScalarType date() { return {TypeKind::Date, {}}; }
    static ScalarType ref(std::string target) { return {TypeKind::Ref, std::move(target)}; }
    static ScalarType doid() { return ref("Object"); }

    bool is_numeric() const { return kind == TypeKind::Integer || kind == TypeKind::Float; }
    bool is_ref() const { return kind == TypeKind::Ref; }

    friend bool operator==(const ScalarType&, const ScalarType&) = default;
};

std::string type_display(const ScalarType& t);

/// A scalar value; monostate is Undefined. Structural equality (used for set
/// semantics) treats Undefined as equal to itself; predicate comparison does
/// not (two-valued logic, see compare_for_predicate).
class ScalarValue {
  public:
    using Storage =
        std::variant<std::monostate, std::int64_t, double, std::string, bool, Date, Oid>;

    ScalarValue() = default;
    explicit ScalarValue(Storage v) : v_(std::move(v)) {}

    static ScalarValue undefined() { return ScalarValue{}; }
    static ScalarValue of_int(std::int64_t x) { return ScalarValue{Storage{x}}; }
    static ScalarValue of_float(double x) { return ScalarValue{Storage{x}}; }
    static ScalarValue of_string(std::string x) { return ScalarValue{Storage{std::move(x)}}; }
    static ScalarValue of_bool(bool x) { return ScalarValue{Storage{x}}; }
    static ScalarValue of_date(Date x) { return ScalarValue{Storage{x}}; }
    static ScalarValue of_oid(Oid x) { return ScalarValue{Storage{x}}; }

    bool is_undefined() const { return std::holds_alternative<std::monostate>(v_); }
    const Storage& storage() const { return v_; }

    std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
    double as_float() const { return std::get<double>(v_); }
    const std::string& as_string() const { return std::get<std::string>(v_); }
    bool as_bool() const { return std::get<bool>(v_); }
    Date as_date() const { return std::get<Date>(v_); }
    Oid as_oid() const { return std::get<Oid>(v_); }

    /// True when the payload kind matches the given scalar type. Ref targets
    /// are not checked here (an Oid payload fits any Ref type); referential
    /// integrity is storage's job.
    bool fits(const ScalarType& t) const;

    /// Structural equality: same kind, same payload; Undefined == Undefined.
    /// Floats compare bitwise.
    friend bool operator==(const ScalarValue& a, const ScalarValue& b);

    /// Total order used for canonical sorting only (Undefined first, floats
    /// by bit pattern). Not the predicate comparison.
    friend std::strong_ordering operator<=>(const ScalarValue& a, const ScalarValue& b);

    std::string display() const;

  private:
    Storage v_;
};

/// Predicate-level comparison: returns nullopt when either side is Undefined
/// or the kinds are incomparable (the comparison is then FALSE under the
/// two-valued rule).
std::optional<std::strong_ordering> compare_for_predicate(const ScalarValue& a,
                                                          const ScalarValue& b);

/// Dotted attribute name, stored as segments and never re-parsed from the
/// display form. Reserved internal names start with '#'.
struct AttrName {
    std::vector<std::string> segments;

    AttrName() = default;
    explicit AttrName(std::string one) : segments{std::move(one)} {}
    explicit AttrName(std::vector<std::string> segs) : segments(std::move(segs)) {}

    std::string display() const;
    bool is_reserved() const { return !segments.empty() && segments.front().starts_with("#"); }

    AttrName prefixed(const std::string& head) const {
        AttrName r;
        r.segments.reserve(segments.size() + 1);
        r.segments.push_back(head);
        r.segments.insert(r.segments.end(), segments.begin(), segments.end());
        return r;
    }
    AttrName prefixed(const AttrName& head) const {
        AttrName r;
        r.segments = head.segments;
        r.segments.insert(r.segments.end(), segments.begin(), segments.end());
        return r;
    }

    friend bool operator==(const AttrName&, const AttrName&) = default;
    friend auto operator<=>(const AttrName&, const AttrName&) = default;
};

// Reserved attribute names. kOidAttr is the back-reference OID column of
// R-variables (displayed as Object(<var>)); kThisAttr threads the group
// member through set-at-a-time evaluation; kValAttr carries scalar results;
// kResultAttr carries method return values.
const AttrName& oid_attr();
const AttrName& this_attr();
const AttrName& val_attr();
const AttrName& result_attr();

} // namespace ro
