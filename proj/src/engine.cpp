#include "ro/engine.hpp"

#include <algorithm>

#include "ro/catalog.hpp"
#include "ro/error.hpp"
#include "ro/parser.hpp"
#include "ro/printer.hpp"
#include "ro/rcompiler.hpp"
#include "ro/rvars.hpp"

namespace ro::engine {

using relalg::RelationValue;
using relalg::Scheme;
using relalg::Tuple;

namespace {

[[noreturn]] void fail(ErrorCode c, const std::string& msg) { throw Error(c, msg); }

} // namespace

relalg::KeySpec key_spec_from(const ast::KeyDef& k) {
    relalg::KeySpec s;
    s.kind = k.kind;
    for (const auto& f : k.fields) s.fields.push_back(AttrName{f});
    if (k.kind == relalg::KeyKind::Foreign) {
        relalg::ForeignTarget t;
        t.type_name = k.fk_type;
        for (const auto& f : k.fk_fields) t.fields.push_back(AttrName{f});
        s.target = std::move(t);
    }
    return s;
}

typesys::ComponentSpec component_spec_from(const typesys::TypeRegistry& reg,
                                           const ast::SignatureDef& sig) {
    typesys::ComponentSpec spec;
    spec.name = sig.name;
    spec.is_method = sig.is_method;
    spec.has_value = !sig.value_type.name.empty();
    if (spec.has_value) spec.value = reg.value_type_for(sig.value_type);
    for (const auto& p : sig.params) {
        if (p.type.name.empty())
            fail(ErrorCode::SyntaxError, "parameter '" + p.name + "' lacks a type");
        spec.params.emplace_back(p.name, reg.value_type_for(p.type));
    }
    for (const auto& k : sig.keys) spec.keys.push_back(key_spec_from(k));
    return spec;
}

// --- Condition / scalar plumbing ------------------------------------------

ScalarValue Engine::const_scalar(const ast::Expr& e) {
    RelationValue r = rcompiler::eval_query(db_, e);
    if (r.scheme().attrs.size() == 1) {
        if (r.empty()) return ScalarValue::undefined();
        if (r.size() == 1) return r.tuples()[0][0];
        fail(ErrorCode::EvaluationError, "argument is not single-valued");
    }
    fail(ErrorCode::EvaluationError, "argument must be a scalar");
}

std::vector<Oid> Engine::group_of(const ast::Expr& e) {
    RelationValue r = rcompiler::eval_query(db_, e);
    return rvars::group_oids(rvars::object_of(r));
}

std::string Engine::common_type_with(const std::vector<Oid>& group,
                                     const std::string& component) {
    const std::string& t0 = db_.cat.oids().type_of(group.at(0));
    for (const auto& anc : db_.types.ancestors(t0)) {
        bool all = true;
        for (Oid o : group)
            if (!db_.cat.is_a(o, anc)) {
                all = false;
                break;
            }
        if (!all) continue;
        try {
            db_.types.require_component(anc, component);
            return anc;
        } catch (const Error&) {
        }
    }
    fail(ErrorCode::UnknownComponent,
         "no common type of the group declares '" + component + "'");
}

bool Engine::eval_condition(const ast::Expr& cond, CommandResult& out) {
    // A group method invocation compared against TRUE/FALSE reads as "some
    // object returned that value" (the transaction-verdict idiom).
    if (cond.kind == ast::ExprKind::Binary &&
        (cond.op == ast::BinOp::Eq || cond.op == ast::BinOp::Ne)) {
        const ast::Expr* callside = nullptr;
        const ast::Expr* litside = nullptr;
        if (cond.a->kind == ast::ExprKind::Call && cond.b->kind == ast::ExprKind::Lit) {
            callside = cond.a.get();
            litside = cond.b.get();
        } else if (cond.b->kind == ast::ExprKind::Call &&
                   cond.a->kind == ast::ExprKind::Lit) {
            callside = cond.b.get();
            litside = cond.a.get();
        }
        if (callside && std::holds_alternative<bool>(litside->lit.storage())) {
            if (!callside->a)
                fail(ErrorCode::EvaluationError, "method call needs a receiver group");
            std::vector<ScalarValue> args;
            for (const auto& a : callside->args) args.push_back(const_scalar(*a));
            std::vector<Oid> group = group_of(*callside->a);
            if (group.empty()) return false;
            std::string type = common_type_with(group, callside->name);
            auto res = rcompiler::execute_method(db_, type, callside->name, group, args);
            for (auto& w : res.warnings) out.messages.push_back(std::move(w));
            std::size_t vi = res.results.scheme().require(val_attr());
            for (const auto& t : res.results.tuples()) {
                bool eq = t[vi] == litside->lit;
                if (cond.op == ast::BinOp::Eq ? eq : !eq) return true;
            }
            return false;
        }
    }
    RelationValue r = rcompiler::eval_query(db_, cond);
    if (r.scheme().attrs.size() == 1 && r.scheme().attrs[0].first == val_attr()) {
        if (r.empty()) return false;
        if (r.size() == 1) {
            const ScalarValue& v = r.tuples()[0][0];
            if (v.is_undefined()) return false;
            if (std::holds_alternative<bool>(v.storage())) return v.as_bool();
        }
    }
    fail(ErrorCode::NonBooleanCondition, "condition is not a boolean");
}

// --- Global variable assignment -------------------------------------------

void Engine::assign_global(const std::string& name, const ast::Expr& rhs,
                           CommandResult& out) {
    auto it = db_.globals.find(name);
    if (it == db_.globals.end())
        fail(ErrorCode::UnknownName, "no global variable '" + name + "'");
    storage::GlobalVar& gv = it->second;
    Scheme vs = storage::value_scheme(db_.types, gv.type);
    RelationValue r = rcompiler::eval_query(db_, rhs);

    std::vector<Tuple> rows;
    if (vs.attrs.size() == 1 && r.scheme().attrs.size() == 1) {
        // Scalar-shaped on both sides; this also covers coercing a group
        // reference into a scalar reference variable.
        for (const auto& t : r.tuples()) {
            if (!t[0].is_undefined() && !t[0].fits(vs.attrs[0].second))
                fail(ErrorCode::TypeMismatch,
                     "value does not fit variable '" + name + "'");
            if (!t[0].is_undefined() || gv.type.is_set) rows.push_back(t);
        }
    } else {
        std::vector<std::size_t> idx;
        for (const auto& [n, ty] : vs.attrs) {
            auto i = r.scheme().find(n);
            if (!i)
                fail(ErrorCode::SchemeMismatch,
                     "value does not fit variable '" + name + "'");
            idx.push_back(*i);
        }
        if (r.scheme().attrs.size() != vs.attrs.size())
            fail(ErrorCode::SchemeMismatch, "value does not fit variable '" + name + "'");
        for (const auto& t : r.tuples()) {
            Tuple row;
            for (std::size_t j = 0; j < idx.size(); ++j) {
                if (!t[idx[j]].is_undefined() && !t[idx[j]].fits(vs.attrs[j].second))
                    fail(ErrorCode::TypeMismatch,
                         "value does not fit variable '" + name + "'");
                row.push_back(t[idx[j]]);
            }
            rows.push_back(std::move(row));
        }
    }
    RelationValue v = RelationValue(vs, std::move(rows)).with_keys(gv.keys);
    if (!gv.type.is_set && v.size() > 1)
        fail(ErrorCode::EvaluationError,
             "several values assigned to scalar variable '" + name + "'");
    if (auto viol = v.key_violation())
        fail(ErrorCode::KeyViolation, "variable '" + name + "': " + *viol);
    gv.value = std::move(v);
    (void)out;
}

// --- Command dispatch -----------------------------------------------------

namespace {

/// Splits a DML/assignment target into (receiver expr, component name) or a
/// bare global name.
struct Target {
    bool is_global = false;
    std::string global_name;
    ast::ExprPtr receiver;
    std::string component;
};

Target split_target(const storage::Database& db, const ast::ExprPtr& target) {
    Target t;
    if (!target) fail(ErrorCode::NotWritable, "missing assignment target");
    if (target->kind == ast::ExprKind::Member) {
        t.receiver = target->a;
        t.component = target->name;
        return t;
    }
    if (target->kind == ast::ExprKind::Path) {
        if (target->path.size() == 1 && db.globals.count(target->path[0])) {
            t.is_global = true;
            t.global_name = target->path[0];
            return t;
        }
        if (target->path.size() >= 2) {
            auto recv = ast::make_expr(ast::ExprKind::Path);
            recv->path.assign(target->path.begin(), target->path.end() - 1);
            t.receiver = recv;
            t.component = target->path.back();
            return t;
        }
    }
    fail(ErrorCode::NotWritable,
         "cannot assign to '" + lang::print_expr(*target) + "'");
}

} // namespace

CommandResult Engine::dispatch(const ast::Command& cmd) {
    CommandResult out;
    auto& reg = db_.types;
    switch (cmd.kind) {
    case ast::CmdKind::DescribeTuple: {
        typesys::TupleTypeDef def;
        def.name = cmd.name;
        for (const auto& sig : cmd.sigs) {
            if (sig.is_method || sig.value_type.name.empty() || !sig.keys.empty() ||
                sig.value_type.is_set)
                fail(ErrorCode::SyntaxError,
                     "tuple attribute '" + sig.name + "' must be a plain scalar");
            typesys::ValueType v = reg.value_type_for(sig.value_type);
            if (v.is_tuple || v.is_set)
                fail(ErrorCode::ExprTypeError,
                     "tuple attribute '" + sig.name + "' must be scalar");
            def.attrs.emplace_back(sig.name, v.scalar);
        }
        reg.define_tuple(std::move(def));
        break;
    }
    case ast::CmdKind::CreateClass: {
        typesys::ObjectTypeDef def;
        def.name = cmd.name;
        def.parents = cmd.parents;
        for (const auto& sig : cmd.sigs) def.own.push_back(component_spec_from(reg, sig));
        reg.create_class(std::move(def));
        db_.sync_base_vars();
        break;
    }
    case ast::CmdKind::AlterAdd:
        reg.alter_add(cmd.name, component_spec_from(reg, cmd.sigs.at(0)));
        db_.sync_base_vars();
        break;
    case ast::CmdKind::AlterDrop:
        reg.alter_drop(cmd.name, cmd.realize_names.at(0));
        db_.sync_base_vars();
        break;
    case ast::CmdKind::AlterAlter:
        reg.alter_alter(cmd.name, component_spec_from(reg, cmd.sigs.at(0)));
        db_.sync_base_vars();
        break;
    case ast::CmdKind::Realize: {
        typesys::ComponentImpl impl;
        switch (cmd.impl_kind) {
        case ast::ImplKind::Stored: impl.kind = typesys::ComponentImpl::Kind::Stored; break;
        case ast::ImplKind::Expr:
            impl.kind = typesys::ComponentImpl::Kind::Computed;
            impl.expr = cmd.impl_expr;
            break;
        case ast::ImplKind::Body:
            impl.kind = typesys::ComponentImpl::Kind::Method;
            impl.body = cmd.impl_body;
            break;
        }
        std::vector<std::string> names = cmd.realize_names;
        if (cmd.realize_all) {
            if (impl.kind != typesys::ComponentImpl::Kind::Stored)
                fail(ErrorCode::ImplKindMismatch,
                     "REALIZE * only combines with AS STORED");
            for (const auto& ec : reg.effective_components(cmd.name))
                if (!ec.spec.is_method && ec.spec.has_value &&
                    !reg.lookup_realization(cmd.name, ec.spec.name))
                    names.push_back(ec.spec.name);
        }
        for (const auto& n : names) reg.realize(cmd.name, n, impl);
        db_.sync_base_vars();
        break;
    }
    case ast::CmdKind::DropClass: {
        for (const auto& [ord, of] : db_.cat.oids().rows())
            if (reg.is_subtype(of, cmd.name))
                fail(ErrorCode::TypeInUse,
                     "objects of type '" + cmd.name + "' still exist");
        reg.drop_class(cmd.name);
        db_.sync_base_vars();
        break;
    }
    case ast::CmdKind::CreateGlobal: {
        if (db_.globals.count(cmd.name) || reg.has_type(cmd.name))
            fail(ErrorCode::DuplicateName, "name '" + cmd.name + "' is taken");
        storage::GlobalVar gv;
        gv.declared = cmd.global_type;
        gv.type = reg.value_type_for(cmd.global_type);
        for (const auto& k : cmd.global_keys) gv.keys.push_back(key_spec_from(k));
        Scheme vs = storage::value_scheme(reg, gv.type);
        for (const auto& k : gv.keys)
            for (const auto& f : k.fields)
                if (!vs.has(f))
                    fail(ErrorCode::KeyFieldUnknown,
                         "key field '" + f.display() + "' not in variable scheme");
        std::vector<Tuple> init;
        if (gv.type.is_tuple && !gv.type.is_set) {
            // A tuple variable always holds exactly one row; it starts with
            // every attribute undefined so UPDATE can fill it in.
            init.emplace_back(vs.attrs.size(), ScalarValue::undefined());
        }
        gv.value = RelationValue(vs, std::move(init)).with_keys(gv.keys);
        db_.globals.emplace(cmd.name, std::move(gv));
        break;
    }
    case ast::CmdKind::DropGlobal:
        if (!db_.globals.erase(cmd.name))
            fail(ErrorCode::UnknownName, "no global variable '" + cmd.name + "'");
        break;
    case ast::CmdKind::New: {
        const typesys::ComponentSpec* ctor = reg.constructor_of(cmd.name);
        std::size_t arity = ctor ? ctor->params.size() : 0;
        if (cmd.args.size() != arity)
            fail(ErrorCode::CtorArityMismatch,
                 "constructor of " + cmd.name + " takes " + std::to_string(arity) +
                     " argument(s), got " + std::to_string(cmd.args.size()));
        std::vector<ScalarValue> args;
        for (const auto& a : cmd.args) args.push_back(const_scalar(*a));
        Oid o = storage::create_object(db_, cmd.name);
        if (ctor) {
            auto impl = reg.lookup_realization(cmd.name, ctor->name);
            if (!impl || impl->first.kind != typesys::ComponentImpl::Kind::Method)
                fail(ErrorCode::UnrealizedComponent,
                     "constructor of " + cmd.name + " is not realized");
            std::vector<std::pair<std::string, ScalarValue>> params;
            for (std::size_t i = 0; i < args.size(); ++i)
                params.emplace_back(ctor->params[i].first, args[i]);
            rcompiler::execute_body(db_, impl->second, impl->first.body, {o}, params,
                                    out.messages);
        }
        out.has_relation = true;
        out.relation = rvars::make_group({o}, cmd.name);
        break;
    }
    case ast::CmdKind::Destroy: {
        std::vector<Oid> group = group_of(*cmd.expr);
        storage::destroy_objects(db_, group);
        out.messages.push_back(std::to_string(group.size()) + " object(s) destroyed");
        break;
    }
    case ast::CmdKind::Execute: {
        const ast::Expr& call = *cmd.expr;
        if (!call.a) fail(ErrorCode::EvaluationError, "EXECUTE needs a receiver group");
        std::vector<ScalarValue> args;
        for (const auto& a : call.args) args.push_back(const_scalar(*a));
        std::vector<Oid> group = group_of(*call.a);
        if (group.empty()) break;
        std::string type = common_type_with(group, call.name);
        auto res = rcompiler::execute_method(db_, type, call.name, group, args);
        out.has_relation = true;
        out.relation = std::move(res.results);
        for (auto& w : res.warnings) out.messages.push_back(std::move(w));
        break;
    }
    case ast::CmdKind::Insert:
    case ast::CmdKind::Update:
    case ast::CmdKind::Delete:
    case ast::CmdKind::Assign: {
        Target t = split_target(db_, cmd.target);
        ast::StmtKind sk = ast::StmtKind::Assign;
        if (cmd.kind == ast::CmdKind::Insert) sk = ast::StmtKind::Insert;
        if (cmd.kind == ast::CmdKind::Update) sk = ast::StmtKind::Update;
        if (cmd.kind == ast::CmdKind::Delete) sk = ast::StmtKind::Delete;
        auto stmt = ast::make_stmt(sk);
        auto tgt = ast::make_expr(ast::ExprKind::Path);
        tgt->path = {t.is_global ? t.global_name : t.component};
        stmt->target = tgt;
        stmt->expr = cmd.expr;
        stmt->cond = cmd.cond;
        stmt->sets = cmd.sets;
        if (t.is_global) {
            ast::StmtPtr a = sk == ast::StmtKind::Assign
                                 ? ast::StmtPtr(stmt)
                                 : rcompiler::rewrite_dml_as_assignment(*stmt);
            assign_global(t.global_name, *a->expr, out);
        } else {
            std::vector<Oid> group = group_of(*t.receiver);
            if (group.empty()) break;
            std::string type = common_type_with(group, t.component);
            rcompiler::execute_body(db_, type, {stmt}, group, {}, out.messages);
        }
        break;
    }
    case ast::CmdKind::Query:
        out.has_relation = true;
        out.relation = rcompiler::eval_query(db_, *cmd.expr);
        break;
    case ast::CmdKind::Begin:
        if (tx_) fail(ErrorCode::UsageError, "transaction already open (no nesting)");
        tx_ = db_;
        break;
    case ast::CmdKind::Commit:
        if (!tx_) fail(ErrorCode::UsageError, "no open transaction");
        tx_.reset();
        break;
    case ast::CmdKind::Rollback:
        if (!tx_) fail(ErrorCode::UsageError, "no open transaction");
        db_ = std::move(*tx_);
        tx_.reset();
        out.messages.push_back("rolled back");
        break;
    case ast::CmdKind::IfCmd: {
        bool c = eval_condition(*cmd.cond, out);
        const ast::CommandPtr& branch = c ? cmd.then_cmd : cmd.else_cmd;
        if (branch) {
            CommandResult sub = dispatch(*branch);
            for (auto& m : sub.messages) out.messages.push_back(std::move(m));
        }
        break;
    }
    }
    return out;
}

CommandResult Engine::execute(const ast::Command& cmd) {
    if (cmd.kind == ast::CmdKind::Query) return dispatch(cmd);
    storage::Database before = db_;
    try {
        CommandResult out = dispatch(cmd);
        auto kv = storage::check_keys(db_);
        if (!kv.empty()) {
            db_ = std::move(before);
            fail(ErrorCode::KeyViolation, kv.front().where + ": " + kv.front().message);
        }
        auto rv = storage::check_ref_integrity(db_);
        if (!rv.empty()) {
            db_ = std::move(before);
            fail(ErrorCode::RefIntegrityViolation,
                 rv.front().where + ": " + rv.front().message);
        }
        return out;
    } catch (const Error&) {
        // Transaction verbs fail only before touching any state, so restoring
        // the pre-command snapshot is always correct and the open snapshot,
        // if any, stays valid.
        db_ = std::move(before);
        throw;
    }
}

std::vector<CommandResult> Engine::execute_script(const std::string& text) {
    std::vector<CommandResult> out;
    for (const auto& c : lang::parse_commands(text)) out.push_back(execute(*c));
    return out;
}

} // namespace ro::engine
