#include "lmt/typecheck.hpp"

#include <sstream>

#include "lmt/parse.hpp"

namespace lmt {

namespace {

std::set<std::string> region_type_vars(const RegionContext& R) {
    std::set<std::string> out;
    for (const auto& [r, info] : R.entries())
        if (info.content) out.merge(free_type_vars(info.content));
    return out;
}

Check compat_rec(const RegionContext& R, const Type& a, const std::set<std::string>& rvars) {
    switch (a->kind) {
    case TypeKind::var:
    case TypeKind::unit:
    case TypeKind::behaviour:
        return {};
    case TypeKind::arrow: {
        if (auto c = compat_rec(R, a->left, rvars); !c) return c;
        return compat_rec(R, a->right, rvars);
    }
    case TypeKind::bang:
    case TypeKind::para:
        return compat_rec(R, a->left, rvars);
    case TypeKind::forall:
        if (rvars.count(a->name)) return {false, "quantified variable " + a->name + " is free in the region context"};
        return compat_rec(R, a->left, rvars);
    case TypeKind::region: {
        if (!R.contains(a->name)) return {false, "region #" + a->name + " of " + to_string(a) + " is not declared"};
        Type content = R.content(a->name);
        if (!content) return {false, "region #" + a->name + " has no content type"};
        if (!type_equal(content, a->left))
            return {false, to_string(a) + " does not match the declared content " + to_string(content) + " of #" + a->name};
        return {};
    }
    }
    return {};
}

}  // namespace

Check check_compat(const RegionContext& R, const Type& alpha) { return compat_rec(R, alpha, region_type_vars(R)); }

Check check_region_ctx(const RegionContext& R) {
    for (const auto& [r, info] : R.entries()) {
        if (!info.content) return {false, "region #" + r + " has no content type"};
        if (!is_result_type(info.content)) return {false, "content of #" + r + " must be a result type"};
        if (auto c = check_compat(R, info.content); !c) return c;
    }
    return {};
}

Check check_type(const RegionContext& R, const Type& alpha) {
    if (auto c = check_region_ctx(R); !c) return c;
    return check_compat(R, alpha);
}

Check check_ctx(const RegionContext& R, const TypedVarContext& gamma) {
    if (auto c = check_region_ctx(R); !c) return c;
    for (const auto& [x, e] : gamma) {
        if (!is_result_type(e.type)) return {false, "variable " + x + " must have a result type"};
        if (auto c = check_compat(R, e.type); !c) return c;
    }
    return {};
}

namespace {

struct Failure {
    TypeError err;
};

class Checker {
public:
    Checker(const RegionContext& R, const std::map<std::string, Type>& locs) : R_(R), locs_(locs) {
        for (const auto& [x, t] : locs) constants_.insert(x);
    }

    TypeDerivation run(const Term& t, const TypedVarContext& G, unsigned d, const Address& w) {
        const Node& n = *t;
        TypeDerivation out{"", G, d, t, nullptr, {}};
        switch (n.kind) {
        case Kind::var:
            out.rule = "var";
            out.type = variable(n.name, G, w);
            break;
        case Kind::unit:
            out.rule = "unit";
            out.type = ty::unit();
            break;
        case Kind::region: {
            out.rule = "region";
            if (!R_.contains(n.name)) fail(w, "region", "", "", "region #" + n.name + " is not declared");
            out.type = ty::region(n.name, R_.content(n.name));
            break;
        }
        case Kind::lam: {
            out.rule = "lam";
            if (!n.annot) fail(w, "lam", "", "", "λ-binder " + n.name + " needs a type annotation");
            well_formed(n.annot, w, "lam");
            if (!is_result_type(n.annot)) fail(w, "lam", "a result type", to_string(n.annot), "λ domain must be a result type");
            std::size_t k = count_occ(n.name, n.first);
            if (k != 1)
                fail(w, "lam", "", "", "λ-binder " + n.name + " binds " + std::to_string(k) + " occurrences, exactly one is required");
            TypedVarContext G2 = G;
            G2[n.name] = {Usage::lam, n.annot};
            out.premises.push_back(run(n.first, G2, d, w.child(0)));
            out.type = ty::arrow(n.annot, out.premises[0].type);
            break;
        }
        case Kind::app: {
            out.rule = "app";
            out.premises.push_back(run(n.first, G, d, w.child(0)));
            out.premises.push_back(run(n.second, G, d, w.child(1)));
            Type f = out.premises[0].type, a = out.premises[1].type;
            if (f->kind != TypeKind::arrow)
                fail(w.child(0), "app", "a function type", to_string(f), "applying a term that is not a function");
            if (!type_equal(f->left, a))
                fail(w.child(1), "app", to_string(f->left), to_string(a), "argument type does not match the domain");
            out.type = f->right;
            break;
        }
        case Kind::bang: {
            out.rule = "bang";
            std::size_t k = count_all_free(n.first, constants_);
            if (k > 1)
                fail(w, "bang", "", "", "!-term has " + std::to_string(k) + " free variable occurrences, at most one is allowed");
            TypedVarContext G2;
            for (const auto& [x, e] : G)
                if (e.usage == Usage::bang) G2[x] = {Usage::lam, e.type};
            out.premises.push_back(run(n.first, G2, d + 1, w.child(0)));
            out.type = ty::bang(result(out.premises[0].type, w, "bang"));
            break;
        }
        case Kind::para: {
            out.rule = "para";
            TypedVarContext G2;
            for (const auto& [x, e] : G)
                if (e.usage != Usage::lam) G2[x] = {Usage::lam, e.type};
            out.premises.push_back(run(n.first, G2, d + 1, w.child(0)));
            out.type = ty::para(result(out.premises[0].type, w, "para"));
            break;
        }
        case Kind::let_bang:
        case Kind::let_para: {
            bool bang = n.kind == Kind::let_bang;
            out.rule = bang ? "let!" : "let$";
            std::size_t k = count_occ(n.name, n.second);
            if (k == 0 || (!bang && k > 1))
                fail(w, out.rule, "", "", out.rule + "-binder " + n.name + " binds " + std::to_string(k) + " occurrences");
            out.premises.push_back(run(n.first, G, d, w.child(0)));
            Type m = out.premises[0].type;
            TypeKind want = bang ? TypeKind::bang : TypeKind::para;
            if (m->kind != want)
                fail(w.child(0), out.rule, bang ? "!A" : "$A", to_string(m), "bound term has the wrong modality");
            TypedVarContext G2 = G;
            G2[n.name] = {bang ? Usage::bang : Usage::para, m->left};
            out.premises.push_back(run(n.second, G2, d, w.child(1)));
            out.type = out.premises[1].type;
            break;
        }
        case Kind::gen: {
            out.rule = "gen";
            std::set<std::string> bad = region_type_vars(R_);
            for (const auto& [x, e] : G) bad.merge(free_type_vars(e.type));
            for (const auto& [x, t2] : locs_) bad.merge(free_type_vars(t2));
            // gen binders are α-convertible; a clash with the context only
            // arises after substitution under another gen of the same name
            std::string t = n.name;
            Term body = n.first;
            if (bad.count(t)) {
                bad.merge(free_type_vars(body));
                t = fresh_name(n.name, bad);
                body = substitute_type(body, n.name, ty::var(t));
            }
            out.premises.push_back(run(body, G, d, w));
            out.type = ty::forall(t, result(out.premises[0].type, w, "gen"));
            break;
        }
        case Kind::inst: {
            out.rule = "inst";
            well_formed(n.annot, w, "inst");
            if (!is_result_type(n.annot)) fail(w, "inst", "a result type", to_string(n.annot), "instantiation with B");
            out.premises.push_back(run(n.first, G, d, w));
            Type m = out.premises[0].type;
            if (m->kind != TypeKind::forall) fail(w, "inst", "a ∀-type", to_string(m), "instantiating a term that is not polymorphic");
            out.type = subst_type(m->left, n.annot, m->name);
            break;
        }
        case Kind::get: {
            out.rule = "get";
            out.type = region_access(n, G, d, w).second;
            break;
        }
        case Kind::set: {
            out.rule = "set";
            Type content = region_access(n, G, d, w).second;
            out.premises.push_back(run(n.first, G, d, w.child(0)));
            if (!type_equal(content, out.premises[0].type))
                fail(w.child(0), "set", to_string(content), to_string(out.premises[0].type), "assigned term does not match the region type");
            out.type = ty::unit();
            break;
        }
        case Kind::store: {
            out.rule = "store";
            if (d != 0) fail(w, "store", "", "", "store judged at depth " + std::to_string(d) + " instead of 0");
            auto [r, content] = store_region(n, w);
            out.premises.push_back(run(n.first, G, R_.depth(r), w.child(0)));
            if (!type_equal(content, out.premises[0].type))
                fail(w.child(0), "store", to_string(content), to_string(out.premises[0].type), "stored term does not match the region type");
            out.type = ty::behaviour();
            break;
        }
        case Kind::par: {
            out.premises.push_back(run(n.first, G, d, w.child(0)));
            out.premises.push_back(run(n.second, G, d, w.child(1)));
            Type a = out.premises[0].type, b = out.premises[1].type;
            bool left_store = is_store_program(n.first), right_store = is_store_program(n.second);
            if (left_store || (!right_store && a->kind == TypeKind::unit)) {
                out.rule = "par-left";
                out.type = b;
            } else if (right_store || b->kind == TypeKind::unit) {
                out.rule = "par-right";
                out.type = a;
            } else {
                out.rule = "par";
                out.type = ty::behaviour();
            }
            break;
        }
        case Kind::nu: {
            out.rule = "nu";
            if (!n.annot || n.annot->kind != TypeKind::region)
                fail(w, "nu", "Reg #r A", n.annot ? to_string(n.annot) : "nothing", "location needs a region type");
            well_formed(n.annot, w, "nu");
            if (G.count(n.name) || locs_.count(n.name)) fail(w, "nu", "", "", "location " + n.name + " shadows another name");
            auto saved = locs_;
            locs_[n.name] = n.annot;
            constants_.insert(n.name);
            out.premises.push_back(run(n.first, G, d, w.child(0)));
            locs_ = saved;
            constants_.erase(n.name);
            out.type = out.premises[0].type;
            break;
        }
        case Kind::bag:
            fail(w, "bag", "", "", "unfolded programs cannot be typed");
        }
        return out;
    }

private:
    const RegionContext& R_;
    std::map<std::string, Type> locs_;
    std::set<std::string> constants_;

    [[noreturn]] static void fail(const Address& w, const std::string& rule, const std::string& expected,
                                  const std::string& actual, const std::string& message) {
        throw Failure{TypeError{w, rule, expected, actual, message}};
    }

    void well_formed(const Type& t, const Address& w, const std::string& rule) {
        if (auto c = check_compat(R_, t); !c) fail(w, rule, "", to_string(t), c.reason);
    }

    Type result(const Type& t, const Address& w, const std::string& rule) {
        if (!is_result_type(t)) fail(w, rule, "a result type", to_string(t), "modal and ∀ types need a result type");
        return t;
    }

    Type variable(const std::string& x, const TypedVarContext& G, const Address& w) {
        auto it = G.find(x);
        if (it == G.end()) {
            auto l = locs_.find(x);
            if (l != locs_.end()) return l->second;
            fail(w, "var", "", "", "variable " + x + " is not in the context");
        }
        if (it->second.usage != Usage::lam)
            fail(w, "var", "", "", "variable " + x + " has usage " + usage_name(it->second.usage) + " at this depth");
        return it->second.type;
    }

    // The region and content type accessed by a get/set at depth d.
    std::pair<std::string, Type> region_access(const Node& n, const TypedVarContext& G, unsigned d, const Address& w) {
        std::string rule = kind_name(n.kind);
        std::string r;
        if (!n.var_target) {
            r = n.name;
        } else {
            Type t = variable(n.name, G, w);
            if (t->kind != TypeKind::region)
                fail(w, rule, "Reg #r A", to_string(t), "target " + n.name + " is not a region");
            r = t->name;
        }
        if (!R_.contains(r)) fail(w, rule, "", "", "region #" + r + " is not declared");
        if (R_.depth(r) != d)
            fail(w, rule, "depth " + std::to_string(R_.depth(r)), "depth " + std::to_string(d),
                 rule + " on #" + r + " occurs at the wrong depth");
        return {r, R_.content(r)};
    }

    std::pair<std::string, Type> store_region(const Node& n, const Address& w) {
        std::string r = n.name;
        if (n.var_target) {
            auto it = locs_.find(n.name);
            if (it == locs_.end()) fail(w, "store", "", "", "store target " + n.name + " is not a location");
            r = it->second->name;
        }
        if (!R_.contains(r)) fail(w, "store", "", "", "region #" + r + " is not declared");
        return {r, R_.content(r)};
    }
};

void render(const TypeDerivation& d, const std::string& regions, int indent, std::ostringstream& os) {
    os << std::string(static_cast<std::size_t>(indent) * 2, ' ') << regions << "; ";
    if (d.gamma.empty()) os << "-";
    bool first = true;
    for (const auto& [x, e] : d.gamma) {
        os << (first ? "" : ", ") << x << ":(" << usage_name(e.usage) << ", " << to_string(e.type) << ")";
        first = false;
    }
    os << " ⊢^" << d.delta << " " << print(d.term) << " : " << to_string(d.type) << "   (" << d.rule << ")\n";
    for (const auto& p : d.premises) render(p, regions, indent + 1, os);
}

}  // namespace

std::string TypeDerivation::to_text(const RegionContext& R) const {
    std::ostringstream os;
    render(*this, R.empty() ? "-" : R.to_string(), 0, os);
    return os.str();
}

TypeResult typecheck(const Program& p, const RegionContext& R, const TypedVarContext& gamma, unsigned delta,
                     const std::map<std::string, Type>& locations) {
    TypeResult out;
    if (auto c = check_ctx(R, gamma); !c) {
        out.error = TypeError{Address{}, "context", "", "", c.reason};
        return out;
    }
    for (const auto& [x, t] : locations) {
        if (auto c = check_compat(R, t); !c) {
            out.error = TypeError{Address{}, "context", "", to_string(t), c.reason};
            return out;
        }
    }
    try {
        out.derivation = Checker(R, locations).run(p, gamma, delta, Address{});
    } catch (const Failure& f) {
        out.error = f.err;
    }
    return out;
}

std::string explain(const TypeError& err) {
    std::ostringstream os;
    os << "type error at address " << err.address.to_string() << " (rule " << err.rule << "): " << err.message;
    if (!err.expected.empty() || !err.actual.empty()) os << "\n  expected: " << err.expected << "\n  actual:   " << err.actual;
    os << "\n";
    return os.str();
}

}  // namespace lmt
