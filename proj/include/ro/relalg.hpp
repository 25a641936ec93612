#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ro/error.hpp"
#include "ro/scalar.hpp"

namespace ro::relalg {

enum class KeyKind { Local, Global, Foreign };

struct ForeignTarget {
    std::string type_name;
    std::string component;
    std::vector<AttrName> fields;

    friend bool operator==(const ForeignTarget&, const ForeignTarget&) = default;
};

struct KeySpec {
    KeyKind kind = KeyKind::Local;
    std::vector<AttrName> fields;
    std::optional<ForeignTarget> target; // Foreign only

    friend bool operator==(const KeySpec&, const KeySpec&) = default;
};

struct Scheme {
    std::vector<std::pair<AttrName, ScalarType>> attrs;
    std::vector<KeySpec> keys;

    std::optional<std::size_t> find(const AttrName& name) const;
    std::size_t require(const AttrName& name) const;
    const ScalarType& type_of(const AttrName& name) const { return attrs[require(name)].second; }
    bool has(const AttrName& name) const { return find(name).has_value(); }

    void add(AttrName name, ScalarType type);

    /// Same attribute names and types, order-insensitive. Keys ignored.
    bool consistent_with(const Scheme& other) const;

    std::string display() const;

    friend bool operator==(const Scheme&, const Scheme&) = default;
};

using Tuple = std::vector<ScalarValue>;

/// Immutable duplicate-free relation value: the universal currency of the
/// system. Tuples are kept in canonical sorted order so equality and display
/// are deterministic.
class RelationValue {
  public:
    RelationValue() = default;
    explicit RelationValue(Scheme scheme) : scheme_(std::move(scheme)) {}
    RelationValue(Scheme scheme, std::vector<Tuple> tuples);

    const Scheme& scheme() const { return scheme_; }
    const std::vector<Tuple>& tuples() const { return tuples_; }
    std::size_t size() const { return tuples_.size(); }
    bool empty() const { return tuples_.empty(); }

    bool contains(const Tuple& t) const;

    /// Checks declared Local/Global key uniqueness and no-Undefined-in-key.
    /// Returns a human-readable violation description, or nullopt.
    std::optional<std::string> key_violation() const;

    RelationValue with_keys(std::vector<KeySpec> keys) const;

    friend bool operator==(const RelationValue&, const RelationValue&) = default;

  private:
    Scheme scheme_;
    std::vector<Tuple> tuples_;
};

// --- Predicates -----------------------------------------------------------

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class ArithOp { Add, Sub, Mul, Div };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    enum class Kind { Attr, Lit, Arith };
    Kind kind;
    AttrName attr;      // Attr
    ScalarValue lit;    // Lit
    ArithOp op{};       // Arith
    TermPtr lhs, rhs;   // Arith

    static TermPtr make_attr(AttrName a);
    static TermPtr make_lit(ScalarValue v);
    static TermPtr make_arith(ArithOp op, TermPtr l, TermPtr r);
};

struct Predicate;
using PredicatePtr = std::shared_ptr<const Predicate>;

/// Predicate grammar per the selection contract: comparisons, IS NULL,
/// boolean connectives, constants, and membership of a term tuple in a
/// materialized relation (the lowered form of EXIST / correlated subqueries).
struct Predicate {
    enum class Kind { Cmp, IsNull, And, Or, Not, Bool, InRel };
    Kind kind;
    CmpOp op{};                 // Cmp
    TermPtr lhs, rhs;           // Cmp
    TermPtr term;               // IsNull
    bool negated = false;       // IsNull: NOT IS NULL
    PredicatePtr a, b;          // And/Or/Not(a)
    bool value = false;         // Bool
    std::vector<TermPtr> terms; // InRel key terms
    std::shared_ptr<const RelationValue> rel; // InRel

    static PredicatePtr make_cmp(CmpOp op, TermPtr l, TermPtr r);
    static PredicatePtr make_is_null(TermPtr t, bool negated = false);
    static PredicatePtr make_and(PredicatePtr a, PredicatePtr b);
    static PredicatePtr make_or(PredicatePtr a, PredicatePtr b);
    static PredicatePtr make_not(PredicatePtr a);
    static PredicatePtr make_bool(bool v);
    static PredicatePtr make_in(std::vector<TermPtr> terms, RelationValue rel);
};

/// Evaluates an arithmetic term against one tuple. Undefined operands
/// propagate; division by zero raises EvaluationError.
ScalarValue eval_term(const Term& t, const Scheme& scheme, const Tuple& row);

/// Two-valued logic: any comparison touching Undefined is FALSE; only
/// IS NULL sees Undefined.
bool eval_predicate(const Predicate& p, const Scheme& scheme, const Tuple& row);

/// Type-checks a predicate against a scheme (UnknownAttribute/TypeMismatch).
void check_predicate(const Predicate& p, const Scheme& scheme);

// --- Operations -----------------------------------------------------------
// Results always carry no keys and are duplicate-free.

RelationValue set_union(const RelationValue& a, const RelationValue& b);
RelationValue minus(const RelationValue& a, const RelationValue& b);
RelationValue intersect(const RelationValue& a, const RelationValue& b);
RelationValue product(const RelationValue& a, const RelationValue& b);

/// Natural-join over the listed attribute pairs; b's join columns are
/// dropped from the result.
RelationValue join_on(const RelationValue& a, const RelationValue& b,
                      const std::vector<std::pair<AttrName, AttrName>>& pairs);

RelationValue select_where(const RelationValue& a, const Predicate& cond);

/// Row-callback selection used by the evaluator where the condition needs
/// context a pure predicate AST cannot carry.
RelationValue select_rows(const RelationValue& a,
                          const std::function<bool(const Tuple&)>& keep);

struct ProjectSpec {
    std::vector<AttrName> keep;
    std::vector<AttrName> drop;
    std::vector<std::pair<AttrName, AttrName>> renames; // applied after keep/drop
};

RelationValue project(const RelationValue& a, const ProjectSpec& spec);

RelationValue rename(const RelationValue& a,
                     const std::vector<std::pair<AttrName, AttrName>>& renames);

enum class Aggregate { Sum, Count };

struct SummarizeAdd {
    Aggregate agg = Aggregate::Sum;
    AttrName source;
    AttrName result;
};

/// One tuple per distinct by-combination. SUM skips Undefined; a group whose
/// sources are all Undefined yields Undefined; COUNT counts defined values.
RelationValue summarize(const RelationValue& a, const std::vector<AttrName>& by,
                        const std::vector<SummarizeAdd>& adds);

/// Extends the relation with a computed column (evaluator plumbing; not a
/// user-level operation).
RelationValue extend(const RelationValue& a, AttrName name, ScalarType type,
                     const std::function<ScalarValue(const Tuple&)>& fn);

/// Row-callback update map: replaces listed columns with computed values for
/// rows matching keep (all rows when keep is null).
RelationValue map_rows(const RelationValue& a,
                       const std::vector<std::pair<AttrName,
                                                   std::function<ScalarValue(const Tuple&)>>>& sets,
                       const std::function<bool(const Tuple&)>& keep);

} // namespace ro::relalg
