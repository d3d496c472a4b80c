#include "lmt/depth.hpp"

#include <sstream>

#include "lmt/parse.hpp"

namespace lmt {

namespace crit {
const char* affine_lambda = "lambda-abstraction is affine: its variable occurs at most once and at depth 0";
const char* bang_binder = "let-! binders are for duplication: the variable occurs at depth 1 below a modality";
const char* para_binder = "let-$ binders are affine: the variable occurs at most once, at depth 1, below a $";
const char* one_free = "a !-term may contain at most one occurrence of free variable";
const char* strict = "the system is strictly linear: a binder binds zero occurrences";
const char* stratified = "get and set on a region r only occur at depth R(r)";
const char* global_store = "stores are global and occur at depth 0";
const char* declared = "the region context covers every region of the program";
const char* scope = "every free variable is declared in the context";
}  // namespace crit

std::string usage_name(Usage u) {
    switch (u) {
    case Usage::lam: return "λ";
    case Usage::para: return "§";
    case Usage::bang: return "!";
    }
    return "?";
}

namespace {

struct Failure {
    WfError err;
};

class Checker {
public:
    Checker(const RegionContext& R, const std::map<std::string, Type>& locs) : R_(R), locs_(locs) {
        for (const auto& [x, t] : locs) constants_.insert(x);
    }

    DepthDerivation run(const Term& t, const VarContext& G, unsigned d, const Address& w) {
        const Term& s = strip(t);
        const Node& n = *s;
        DepthDerivation out{"", G, d, s, {}};
        switch (n.kind) {
        case Kind::var:
            out.rule = "var";
            occurrence(n.name, G, d, w);
            break;
        case Kind::unit:
            out.rule = "unit";
            break;
        case Kind::region:
            out.rule = "region";
            if (!R_.contains(n.name)) fail(w, "region", crit::declared, "region #" + n.name + " is not in the region context");
            break;
        case Kind::lam: {
            out.rule = "lam";
            std::size_t k = count_occ(n.name, n.first);
            if (k == 0) fail(w, "lam", crit::strict, "λ-binder " + n.name + " binds zero occurrences");
            if (k > 1)
                fail(w, "lam", crit::affine_lambda,
                     "λ-binder " + n.name + " binds " + std::to_string(k) + " occurrences, fo(x, M) = 1 is required");
            VarContext G2 = G;
            G2[n.name] = Usage::lam;
            out.premises.push_back(run(n.first, G2, d, w.child(0)));
            break;
        }
        case Kind::app:
            out.rule = "app";
            out.premises.push_back(run(n.first, G, d, w.child(0)));
            out.premises.push_back(run(n.second, G, d, w.child(1)));
            break;
        case Kind::bang: {
            out.rule = "bang";
            std::size_t k = count_all_free(n.first, constants_);
            if (k > 1)
                fail(w, "bang", crit::one_free,
                     "!-term has " + std::to_string(k) + " free variable occurrences, fo_all(M) <= 1 is required");
            VarContext G2;
            for (const auto& [x, u] : G)
                if (u == Usage::bang) G2[x] = Usage::lam;
            out.premises.push_back(run(n.first, G2, d + 1, w.child(0)));
            break;
        }
        case Kind::para: {
            out.rule = "para";
            VarContext G2;
            for (const auto& [x, u] : G)
                if (u != Usage::lam) G2[x] = Usage::lam;
            out.premises.push_back(run(n.first, G2, d + 1, w.child(0)));
            break;
        }
        case Kind::let_bang:
        case Kind::let_para: {
            bool bang = n.kind == Kind::let_bang;
            out.rule = bang ? "let!" : "let$";
            std::size_t k = count_occ(n.name, n.second);
            if (k == 0) fail(w, out.rule, crit::strict, out.rule + "-binder " + n.name + " binds zero occurrences");
            if (!bang && k > 1)
                fail(w, out.rule, crit::para_binder,
                     "let$-binder " + n.name + " binds " + std::to_string(k) + " occurrences, fo(x, N) = 1 is required");
            out.premises.push_back(run(n.first, G, d, w.child(0)));
            VarContext G2 = G;
            G2[n.name] = bang ? Usage::bang : Usage::para;
            out.premises.push_back(run(n.second, G2, d, w.child(1)));
            break;
        }
        case Kind::get:
        case Kind::set: {
            out.rule = kind_name(n.kind);
            stratification(n, G, d, w);
            Term target = n.var_target ? term::var(n.name) : term::region(n.name);
            out.premises.push_back({n.var_target ? "var" : "region", G, d, target, {}});
            if (n.kind == Kind::set) out.premises.push_back(run(n.first, G, d, w.child(0)));
            break;
        }
        case Kind::store: {
            out.rule = "store";
            if (d != 0)
                fail(w, "store", crit::global_store, "store on " + target_name(n) + " judged at depth " + std::to_string(d));
            std::string r = store_region(n, w);
            out.premises.push_back(run(n.first, G, R_.depth(r), w.child(0)));
            break;
        }
        case Kind::par:
            out.rule = "par";
            out.premises.push_back(run(n.first, G, d, w.child(0)));
            out.premises.push_back(run(n.second, G, d, w.child(1)));
            break;
        case Kind::nu: {
            out.rule = "nu";
            if (!n.annot || n.annot->kind != TypeKind::region)
                fail(w, "nu", crit::declared, "location " + n.name + " needs a region type annotation");
            auto saved = locs_;
            auto saved_c = constants_;
            locs_[n.name] = n.annot;
            constants_.insert(n.name);
            VarContext G2 = G;
            G2.erase(n.name);
            out.premises.push_back(run(n.first, G2, d, w.child(0)));
            locs_ = saved;
            constants_ = saved_c;
            break;
        }
        default:
            fail(w, kind_name(n.kind), "unfolded programs are measures only", "cannot check an unfolded program");
        }
        return out;
    }

private:
    const RegionContext& R_;
    std::map<std::string, Type> locs_;
    std::set<std::string> constants_;

    [[noreturn]] static void fail(const Address& w, const std::string& rule, const std::string& criterion,
                                  const std::string& message) {
        throw Failure{WfError{w, rule, criterion, message}};
    }

    static std::string target_name(const Node& n) { return n.var_target ? n.name : "#" + n.name; }

    void occurrence(const std::string& x, const VarContext& G, unsigned d, const Address& w) {
        auto it = G.find(x);
        if (it == G.end()) {
            if (locs_.count(x)) return;
            fail(w, "var", crit::scope, "variable " + x + " is not in the context");
        }
        if (it->second == Usage::lam) return;
        const char* c = it->second == Usage::bang ? crit::bang_binder : crit::para_binder;
        fail(w, "var", c,
             "variable " + x + " has usage " + usage_name(it->second) + " but occurs at depth " + std::to_string(d) +
                 " of its binder instead of below a modality");
    }

    void check_region_depth(const std::string& r, unsigned d, const Address& w, const std::string& rule) {
        if (!R_.contains(r)) fail(w, rule, crit::declared, "region #" + r + " is not in the region context");
        if (R_.depth(r) != d)
            fail(w, rule, crit::stratified,
                 rule + " on #" + r + " occurs at depth " + std::to_string(d) + " but R(" + r + ") = " +
                     std::to_string(R_.depth(r)));
    }

    void stratification(const Node& n, const VarContext& G, unsigned d, const Address& w) {
        std::string rule = kind_name(n.kind);
        if (!n.var_target) {
            check_region_depth(n.name, d, w, rule);
            return;
        }
        if (G.count(n.name)) {
            occurrence(n.name, G, d, w);
            return;
        }
        auto it = locs_.find(n.name);
        if (it == locs_.end()) fail(w, rule, crit::scope, "location " + n.name + " is not declared");
        check_region_depth(it->second->name, d, w, rule);
    }

    std::string store_region(const Node& n, const Address& w) {
        if (!n.var_target) {
            if (!R_.contains(n.name)) fail(w, "store", crit::declared, "region #" + n.name + " is not in the region context");
            return n.name;
        }
        auto it = locs_.find(n.name);
        if (it == locs_.end() || it->second->kind != TypeKind::region)
            fail(w, "store", crit::scope, "store target " + n.name + " is not a declared location");
        const std::string& r = it->second->name;
        if (!R_.contains(r)) fail(w, "store", crit::declared, "region #" + r + " is not in the region context");
        return r;
    }
};

void render(const DepthDerivation& d, const std::string& regions, int indent, std::ostringstream& os) {
    os << std::string(static_cast<std::size_t>(indent) * 2, ' ') << regions << "; ";
    if (d.gamma.empty()) os << "-";
    bool first = true;
    for (const auto& [x, u] : d.gamma) {
        os << (first ? "" : ", ") << x << ":" << usage_name(u);
        first = false;
    }
    os << " ⊢^" << d.delta << " " << print(d.term) << "   (" << d.rule << ")\n";
    for (const auto& p : d.premises) render(p, regions, indent + 1, os);
}

}  // namespace

std::string DepthDerivation::to_text(const RegionContext& R) const {
    std::ostringstream os;
    std::string regions = R.empty() ? "-" : R.to_string();
    render(*this, regions, 0, os);
    return os.str();
}

std::size_t DepthDerivation::node_count() const {
    std::size_t n = 1;
    for (const auto& p : premises) n += p.node_count();
    return n;
}

WfResult check_wf(const Program& p, const RegionContext& R, const VarContext& gamma, unsigned delta,
                  const std::map<std::string, Type>& locations) {
    WfResult out;
    try {
        out.derivation = Checker(R, locations).run(p, gamma, delta, Address{});
    } catch (const Failure& f) {
        out.error = f.err;
    }
    return out;
}

std::string explain(const WfError& err) {
    std::ostringstream os;
    os << "not well-formed at address " << err.address.to_string() << " (rule " << err.rule << "): " << err.message
       << "\n  criterion violated: " << err.criterion << "\n";
    return os.str();
}

}  // namespace lmt
