#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ro/ast.hpp"
#include "ro/relalg.hpp"
#include "ro/scalar.hpp"

namespace ro::typesys {

struct TupleTypeDef {
    std::string name;
    std::vector<std::pair<std::string, ScalarType>> attrs;
};

/// Value type of a component or variable: a scalar, a named tuple type, or a
/// set of either.
struct ValueType {
    bool is_set = false;
    bool is_tuple = false;
    ScalarType scalar;      // when !is_tuple
    std::string tuple_name; // when is_tuple

    static ValueType of_scalar(ScalarType t) { return {false, false, std::move(t), {}}; }
    static ValueType of_tuple(std::string n) { return {false, true, {}, std::move(n)}; }
    static ValueType set_of(ValueType elem) {
        elem.is_set = true;
        return elem;
    }

    friend bool operator==(const ValueType&, const ValueType&) = default;
};

struct ComponentSpec {
    std::string name;
    bool is_method = false; // declared with a parameter list
    bool has_value = true;  // false: constructor/destructor (no value type)
    ValueType value;
    std::vector<std::pair<std::string, ValueType>> params;
    std::vector<relalg::KeySpec> keys;
};

struct ComponentImpl {
    enum class Kind { Stored, Computed, Method };
    Kind kind = Kind::Stored;
    ast::ExprPtr expr;               // Computed
    std::vector<ast::StmtPtr> body;  // Method
};

struct ObjectTypeDef {
    std::string name;
    std::vector<std::string> parents; // empty: only the implicit root Object
    std::vector<ComponentSpec> own;   // declaration order
    std::map<std::string, ComponentImpl> impls; // realizations declared at this type
};

struct EffectiveComponent {
    ComponentSpec spec;
    std::string owner;    // declaring type
    std::string realizer; // nearest realizing type; empty if unrealized
};

/// Name of the implicit root object type.
const std::string& object_root();

class TypeRegistry {
  public:
    TypeRegistry() = default;

    void define_tuple(TupleTypeDef def);
    void create_class(ObjectTypeDef def);
    void alter_add(const std::string& type, ComponentSpec spec);
    void alter_drop(const std::string& type, const std::string& component);
    void alter_alter(const std::string& type, ComponentSpec spec);

    /// Records a realization at `type` for a component of its effective set.
    /// Computed impls are checked for realization cycles.
    void realize(const std::string& type, const std::string& component, ComponentImpl impl);

    void drop_class(const std::string& type);

    const TupleTypeDef* find_tuple(const std::string& name) const;
    const ObjectTypeDef* find_class(const std::string& name) const;
    const TupleTypeDef& require_tuple(const std::string& name) const;
    const ObjectTypeDef& require_class(const std::string& name) const;
    bool has_type(const std::string& name) const; // tuple or class or basic

    /// Declaration order of classes (stable across dump/load).
    const std::vector<std::string>& class_order() const { return class_order_; }
    const std::vector<std::string>& tuple_order() const { return tuple_order_; }

    /// True when derived = base or base is a (transitive) ancestor; every
    /// class is a subtype of Object.
    bool is_subtype(const std::string& derived, const std::string& base) const;

    /// Reflexive-transitive ancestor list, deterministic order: the type
    /// itself, then depth-first left-to-right parents (each once), root last.
    std::vector<std::string> ancestors(const std::string& type) const;

    /// Inherited components first (depth-first, left-to-right, shared bases
    /// once), then own. Realizer is resolved per component; a diamond whose
    /// branches disagree raises AmbiguousRealization when queried via
    /// lookup_realization, and is reported with an empty realizer here.
    std::vector<EffectiveComponent> effective_components(const std::string& type) const;

    /// Nearest explicit realization on the inheritance paths from `type`.
    /// Returns nullopt when no realization exists anywhere.
    std::optional<std::pair<ComponentImpl, std::string>>
    lookup_realization(const std::string& type, const std::string& component) const;

    /// The effective component entry for a name, or throws UnknownComponent.
    EffectiveComponent require_component(const std::string& type,
                                         const std::string& component) const;

    /// Scheme of a component's value (no OID column): one attribute named
    /// like the component for scalars, the tuple fields for tuple/set
    /// components. Keys attached per the declaration.
    relalg::Scheme component_scheme(const std::string& type,
                                    const std::string& component) const;

    /// Scalar type for a type-name written in DDL: basic names, declared
    /// classes (reference type), or not-yet-declared names (forward
    /// reference). Declared tuple names are not scalars.
    ScalarType scalar_type_for(const std::string& name) const;

    /// Resolves a surface type reference to a ValueType.
    ValueType value_type_for(const ast::TypeRef& t) const;

    /// Constructor spec (component named like the type), if declared.
    const ComponentSpec* constructor_of(const std::string& type) const;
    const ComponentSpec* destructor_of(const std::string& type) const;

    /// Every param-free effective component has a realization (objects OF
    /// this type may be created). Throws UnrealizedComponent otherwise.
    void check_fully_realized(const std::string& type) const;

    /// Classes that list `type` directly among their parents.
    std::vector<std::string> direct_children(const std::string& type) const;

  private:
    std::map<std::string, TupleTypeDef> tuples_;
    std::map<std::string, ObjectTypeDef> classes_;
    std::vector<std::string> tuple_order_;
    std::vector<std::string> class_order_;

    ObjectTypeDef& mutable_class(const std::string& name);
    void check_component_spec(const ObjectTypeDef& def, const ComponentSpec& spec) const;
    void check_computed_cycle(const std::string& type, const std::string& component,
                              const ast::Expr& expr) const;
};

bool is_basic_type_name(const std::string& name);
std::optional<ScalarType> basic_scalar_type(const std::string& name);

} // namespace ro::typesys
