#include "ro/dump.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ro/error.hpp"
#include "ro/parser.hpp"
#include "ro/printer.hpp"

namespace ro::dump {

using nlohmann::json;
using relalg::KeySpec;
using relalg::RelationValue;
using relalg::Scheme;
using relalg::Tuple;

namespace {

constexpr int kFormatVersion = 1;

[[noreturn]] void bad(const std::string& msg) {
    throw Error(ErrorCode::IntegrityCheckFailed, msg);
}

// --- JSON encoding --------------------------------------------------------

const char* kind_name(TypeKind k) {
    switch (k) {
    case TypeKind::Integer: return "INTEGER";
    case TypeKind::Float: return "FLOAT";
    case TypeKind::String: return "STRING";
    case TypeKind::Boolean: return "BOOLEAN";
    case TypeKind::Date: return "DATE";
    case TypeKind::Ref: return "REF";
    }
    return "";
}

TypeKind kind_from(const std::string& s) {
    for (TypeKind k : {TypeKind::Integer, TypeKind::Float, TypeKind::String,
                       TypeKind::Boolean, TypeKind::Date, TypeKind::Ref})
        if (s == kind_name(k)) return k;
    bad("unknown scalar kind '" + s + "'");
}

json scalar_type_json(const ScalarType& t) {
    json j{{"k", kind_name(t.kind)}};
    if (t.is_ref()) j["of"] = t.ref_target;
    return j;
}

ScalarType scalar_type_from(const json& j) {
    ScalarType t;
    t.kind = kind_from(j.at("k").get<std::string>());
    if (t.kind == TypeKind::Ref) t.ref_target = j.at("of").get<std::string>();
    return t;
}

json value_type_json(const typesys::ValueType& v) {
    json j{{"set", v.is_set}};
    if (v.is_tuple)
        j["tuple"] = v.tuple_name;
    else
        j["scalar"] = scalar_type_json(v.scalar);
    return j;
}

typesys::ValueType value_type_from(const json& j) {
    typesys::ValueType v;
    v.is_set = j.at("set").get<bool>();
    if (j.contains("tuple")) {
        v.is_tuple = true;
        v.tuple_name = j.at("tuple").get<std::string>();
    } else {
        v.scalar = scalar_type_from(j.at("scalar"));
    }
    return v;
}

json attr_json(const AttrName& a) { return json(a.segments); }

AttrName attr_from(const json& j) {
    return AttrName(j.get<std::vector<std::string>>());
}

const char* key_kind_name(relalg::KeyKind k) {
    switch (k) {
    case relalg::KeyKind::Local: return "LOCAL";
    case relalg::KeyKind::Global: return "GLOBAL";
    case relalg::KeyKind::Foreign: return "FOREIGN";
    }
    return "";
}

json key_json(const KeySpec& k) {
    json fields = json::array();
    for (const auto& f : k.fields) fields.push_back(attr_json(f));
    json j{{"kind", key_kind_name(k.kind)}, {"fields", fields}};
    if (k.target) {
        json tf = json::array();
        for (const auto& f : k.target->fields) tf.push_back(attr_json(f));
        j["on"] = json{{"type", k.target->type_name},
                       {"component", k.target->component},
                       {"fields", tf}};
    }
    return j;
}

KeySpec key_from(const json& j) {
    KeySpec k;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "LOCAL") k.kind = relalg::KeyKind::Local;
    else if (kind == "GLOBAL") k.kind = relalg::KeyKind::Global;
    else if (kind == "FOREIGN") k.kind = relalg::KeyKind::Foreign;
    else bad("unknown key kind '" + kind + "'");
    for (const auto& f : j.at("fields")) k.fields.push_back(attr_from(f));
    if (j.contains("on")) {
        relalg::ForeignTarget t;
        t.type_name = j["on"].at("type").get<std::string>();
        t.component = j["on"].at("component").get<std::string>();
        for (const auto& f : j["on"].at("fields")) t.fields.push_back(attr_from(f));
        k.target = std::move(t);
    }
    return k;
}

json spec_json(const typesys::ComponentSpec& s) {
    json params = json::array();
    for (const auto& [n, t] : s.params)
        params.push_back(json{{"name", n}, {"type", value_type_json(t)}});
    json keys = json::array();
    for (const auto& k : s.keys) keys.push_back(key_json(k));
    return json{{"name", s.name},
                {"method", s.is_method},
                {"value", s.has_value ? value_type_json(s.value) : json()},
                {"params", params},
                {"keys", keys}};
}

typesys::ComponentSpec spec_from(const json& j) {
    typesys::ComponentSpec s;
    s.name = j.at("name").get<std::string>();
    s.is_method = j.at("method").get<bool>();
    s.has_value = !j.at("value").is_null();
    if (s.has_value) s.value = value_type_from(j["value"]);
    for (const auto& p : j.at("params"))
        s.params.emplace_back(p.at("name").get<std::string>(),
                              value_type_from(p.at("type")));
    for (const auto& k : j.at("keys")) s.keys.push_back(key_from(k));
    return s;
}

json impl_json(const typesys::ComponentImpl& impl) {
    switch (impl.kind) {
    case typesys::ComponentImpl::Kind::Stored: return json{{"kind", "stored"}};
    case typesys::ComponentImpl::Kind::Computed:
        return json{{"kind", "computed"}, {"expr", lang::print_expr(*impl.expr)}};
    case typesys::ComponentImpl::Kind::Method:
        return json{{"kind", "method"}, {"body", lang::print_stmts(impl.body)}};
    }
    return {};
}

typesys::ComponentImpl impl_from(const json& j) {
    typesys::ComponentImpl impl;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "stored") {
        impl.kind = typesys::ComponentImpl::Kind::Stored;
    } else if (kind == "computed") {
        impl.kind = typesys::ComponentImpl::Kind::Computed;
        impl.expr = lang::parse_expr(j.at("expr").get<std::string>());
    } else if (kind == "method") {
        impl.kind = typesys::ComponentImpl::Kind::Method;
        impl.body = lang::parse_statements(j.at("body").get<std::string>());
    } else {
        bad("unknown realization kind '" + kind + "'");
    }
    return impl;
}

json value_json(const ScalarValue& v) {
    const auto& s = v.storage();
    if (std::holds_alternative<std::monostate>(s)) return json();
    if (std::holds_alternative<std::int64_t>(s)) return json{{"i", v.as_int()}};
    if (std::holds_alternative<double>(s)) {
        double d = v.as_float();
        if (std::isfinite(d)) return json{{"f", d}};
        // Non-finite floats keep their exact bit pattern.
        std::uint64_t bits;
        std::memcpy(&bits, &d, sizeof bits);
        std::ostringstream ss;
        ss << std::hex << bits;
        return json{{"fb", ss.str()}};
    }
    if (std::holds_alternative<std::string>(s)) return json{{"s", v.as_string()}};
    if (std::holds_alternative<bool>(s)) return json{{"b", v.as_bool()}};
    if (std::holds_alternative<Date>(s)) {
        Date d = v.as_date();
        return json{{"d", {d.day, d.month, d.year}}};
    }
    return json{{"o", v.as_oid().value}};
}

ScalarValue value_from(const json& j) {
    if (j.is_null()) return ScalarValue::undefined();
    if (j.contains("i")) return ScalarValue::of_int(j["i"].get<std::int64_t>());
    if (j.contains("f")) return ScalarValue::of_float(j["f"].get<double>());
    if (j.contains("fb")) {
        std::uint64_t bits = std::stoull(j["fb"].get<std::string>(), nullptr, 16);
        double d;
        std::memcpy(&d, &bits, sizeof d);
        return ScalarValue::of_float(d);
    }
    if (j.contains("s")) return ScalarValue::of_string(j["s"].get<std::string>());
    if (j.contains("b")) return ScalarValue::of_bool(j["b"].get<bool>());
    if (j.contains("d")) {
        auto a = j["d"];
        return ScalarValue::of_date(Date{a.at(0).get<int>(), a.at(1).get<int>(),
                                         a.at(2).get<int>()});
    }
    if (j.contains("o")) return ScalarValue::of_oid(Oid{j["o"].get<std::uint64_t>()});
    bad("unknown value encoding " + j.dump());
}

json rows_json(const RelationValue& r) {
    json rows = json::array();
    for (const auto& t : r.tuples()) {
        json row = json::array();
        for (const auto& v : t) row.push_back(value_json(v));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<Tuple> rows_from(const json& j, std::size_t width) {
    std::vector<Tuple> out;
    for (const auto& row : j) {
        if (row.size() != width) bad("row width does not match the scheme");
        Tuple t;
        for (const auto& v : row) t.push_back(value_from(v));
        out.push_back(std::move(t));
    }
    return out;
}

json attrs_json(const Scheme& s) {
    json out = json::array();
    for (const auto& [n, t] : s.attrs) out.push_back(attr_json(n));
    return out;
}

void check_attrs(const Scheme& s, const json& j, const std::string& where) {
    if (j.size() != s.attrs.size()) bad("attribute list of " + where + " changed");
    for (std::size_t i = 0; i < s.attrs.size(); ++i)
        if (attr_from(j[i]) != s.attrs[i].first)
            bad("attribute list of " + where + " changed");
}

} // namespace

std::string dump_database(const storage::Database& db) {
    json root;
    root["format"] = kFormatVersion;

    json tuples = json::array();
    for (const auto& name : db.types.tuple_order()) {
        const auto& def = db.types.require_tuple(name);
        json attrs = json::array();
        for (const auto& [n, t] : def.attrs)
            attrs.push_back(json{{"name", n}, {"type", scalar_type_json(t)}});
        tuples.push_back(json{{"name", name}, {"attrs", attrs}});
    }
    json classes = json::array();
    for (const auto& name : db.types.class_order()) {
        const auto& def = db.types.require_class(name);
        json comps = json::array();
        for (const auto& c : def.own) comps.push_back(spec_json(c));
        json impls = json::object();
        for (const auto& [comp, impl] : def.impls) impls[comp] = impl_json(impl);
        classes.push_back(json{{"name", name},
                               {"parents", def.parents},
                               {"components", comps},
                               {"realized", std::move(impls)}});
    }
    root["types"] = json{{"tuples", tuples}, {"classes", classes}};

    json objs = json::array();
    for (const auto& [ord, type] : db.cat.oids().rows())
        objs.push_back(json::array({ord, type}));
    root["objects"] = json{{"next", db.cat.oids().next_ordinal()}, {"rows", objs}};

    json base = json::array();
    for (const auto& [key, v] : db.base_vars())
        base.push_back(json{{"type", key.first},
                            {"component", key.second},
                            {"attrs", attrs_json(v.scheme())},
                            {"rows", rows_json(v)}});
    root["base"] = std::move(base);

    json globals = json::array();
    for (const auto& [name, gv] : db.globals) {
        json keys = json::array();
        for (const auto& k : gv.keys) keys.push_back(key_json(k));
        globals.push_back(json{{"name", name},
                               {"type", json{{"set", gv.declared.is_set},
                                             {"name", gv.declared.name}}},
                               {"keys", keys},
                               {"attrs", attrs_json(gv.value.scheme())},
                               {"rows", rows_json(gv.value)}});
    }
    root["globals"] = std::move(globals);

    return root.dump(2) + "\n";
}

storage::Database load_database(const std::string& text) {
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded() || !root.is_object())
        bad("input is not a database dump");
    try {
        if (!root.contains("format"))
            bad("input is not a database dump");
        int version = root["format"].get<int>();
        if (version != kFormatVersion)
            throw Error(ErrorCode::FormatVersionMismatch,
                        "dump format " + std::to_string(version) +
                            " is not supported (expected " +
                            std::to_string(kFormatVersion) + ")");

        storage::Database db;
        for (const auto& t : root.at("types").at("tuples")) {
            typesys::TupleTypeDef def;
            def.name = t.at("name").get<std::string>();
            for (const auto& a : t.at("attrs"))
                def.attrs.emplace_back(a.at("name").get<std::string>(),
                                       scalar_type_from(a.at("type")));
            db.types.define_tuple(std::move(def));
        }
        for (const auto& c : root.at("types").at("classes")) {
            typesys::ObjectTypeDef def;
            def.name = c.at("name").get<std::string>();
            def.parents = c.at("parents").get<std::vector<std::string>>();
            for (const auto& s : c.at("components")) def.own.push_back(spec_from(s));
            db.types.create_class(std::move(def));
        }
        for (const auto& c : root.at("types").at("classes")) {
            std::string name = c.at("name").get<std::string>();
            for (const auto& [comp, impl] : c.at("realized").items())
                db.types.realize(name, comp, impl_from(impl));
        }

        const auto& objs = root.at("objects");
        for (const auto& row : objs.at("rows"))
            db.cat.oids().restore_row(Oid{row.at(0).get<std::uint64_t>()},
                                      row.at(1).get<std::string>());
        db.cat.oids().set_next_ordinal(objs.at("next").get<std::uint64_t>());

        db.sync_base_vars();
        for (const auto& b : root.at("base")) {
            std::string type = b.at("type").get<std::string>();
            std::string comp = b.at("component").get<std::string>();
            if (!db.has_base_var(type, comp))
                bad("no base variable for " + type + "." + comp);
            const Scheme& s = db.base_var(type, comp).scheme();
            check_attrs(s, b.at("attrs"), type + "." + comp);
            db.set_base_var(type, comp,
                            RelationValue(s, rows_from(b.at("rows"), s.attrs.size())));
        }

        for (const auto& g : root.at("globals")) {
            storage::GlobalVar gv;
            gv.declared.is_set = g.at("type").at("set").get<bool>();
            gv.declared.name = g.at("type").at("name").get<std::string>();
            gv.type = db.types.value_type_for(gv.declared);
            for (const auto& k : g.at("keys")) gv.keys.push_back(key_from(k));
            Scheme vs = storage::value_scheme(db.types, gv.type);
            check_attrs(vs, g.at("attrs"), "global " + g.at("name").get<std::string>());
            gv.value = RelationValue(vs, rows_from(g.at("rows"), vs.attrs.size()))
                           .with_keys(gv.keys);
            db.globals.emplace(g.at("name").get<std::string>(), std::move(gv));
        }

        auto violations = storage::check_database(db);
        if (!violations.empty())
            bad(violations.front().where + ": " + violations.front().message);
        return db;
    } catch (const json::exception& e) {
        bad(std::string("malformed dump: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::FormatVersionMismatch ||
            e.code() == ErrorCode::IntegrityCheckFailed)
            throw;
        bad(e.what());
    }
}

void save_file(const storage::Database& db, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
    out << dump_database(db);
    if (!out.flush()) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
}

storage::Database load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_database(ss.str());
}

} // namespace ro::dump
