#include "lmt/encodings.hpp"

#include "lmt/reduce.hpp"

namespace lmt::enc {

namespace {

std::string nested(const std::string& f, unsigned n, const std::string& base) {
    std::string s;
    for (unsigned i = 0; i < n; ++i) s += f + " (";
    s += base;
    s += std::string(n, ')');
    return s;
}

Program P(const std::string& text) { return parse_program(text, aliases()); }

const char* kNatLoc = "!Reg #r !Nat";

}  // namespace

const std::map<std::string, TypeAlias>& aliases() {
    static const std::map<std::string, TypeAlias> table = [] {
        std::map<std::string, TypeAlias> m;
        m["Nat"] = TypeAlias{{}, parse_type("forall t. !(t -o t) -o $(t -o t)")};
        m["BNat"] = TypeAlias{{}, parse_type("forall t. !(t -o t) -o !(t -o t) -o $(t -o t)")};
        m["List"] = TypeAlias{{"u"}, parse_type("forall t. !(u -o t -o t) -o $(t -o t)")};
        return m;
    }();
    return table;
}

Type nat_type() { return aliases().at("Nat").body; }
Type bnat_type() { return aliases().at("BNat").body; }
Type list_type(const Type& elem) { return subst_type(aliases().at("List").body, elem, "u"); }

Program nat(unsigned n) { return P("gen t. \\!f:!(t -o t). $(\\x:t. " + nested("f", n, "x") + ")"); }

Program word(const std::string& bits) {
    std::string body = "z";
    for (auto it = bits.rbegin(); it != bits.rend(); ++it) {
        if (*it != '0' && *it != '1') throw std::invalid_argument("word: expected a string over {0,1}");
        body = std::string(*it == '0' ? "x0" : "x1") + " (" + body + ")";
    }
    return P("gen t. \\!x0:!(t -o t). \\!x1:!(t -o t). $(\\z:t. " + body + ")");
}

Program list(const std::vector<Term>& elems, const Type& elem) {
    using namespace term;
    std::set<std::string> avoid;
    for (const auto& e : elems) avoid.merge(free_vars(e));
    std::string f = fresh_name("f", avoid), x = fresh_name("w", avoid);
    Term body = var(x);
    for (auto it = elems.rbegin(); it != elems.rend(); ++it) body = app({var(f), *it, body});
    Type tv = ty::var("t");
    Type f_ty = ty::bang(ty::arrow(elem, ty::arrow(tv, tv)));
    return gen("t", lam_bang(f, para(lam(x, body, tv)), f_ty));
}

Program add() {
    return P("\\m:Nat. \\n:Nat. gen t. \\!f:!(t -o t). "
             "let $y = m [t] !f in let $z = n [t] !f in $(\\x:t. y (z x))");
}

Program list_it() {
    return P("gen u. gen t. \\f:!(u -o t -o t). \\l:List u. \\$x:$t. let $y = l [t] f in $(y x)");
}

Program seq(const Term& m, const Term& n, const std::string& gr) {
    using namespace term;
    std::set<std::string> avoid = free_vars(n);
    std::string z = fresh_name("z", avoid);
    return app(lam(z, par(set(gr, var(z)), n)), m);
}

std::optional<Program> normalize(const Program& p, std::size_t fuel) {
    RegionContext none;
    Program q = p;
    for (std::size_t i = 0; i < fuel; ++i) {
        auto rs = find_redexes(q, Relation::full, none);
        if (rs.empty()) return q;
        q = step(q, rs.front());
    }
    return std::nullopt;
}

namespace {

// Strips a leading `!` and normalizes.
std::optional<Program> prepare(const Program& p) {
    Program q = erase(p);
    if (q->kind == Kind::bang) q = q->first;
    return normalize(q);
}

// λa.let !b = a in K, returning b and K.
bool match_bang_binder(const Term& t, std::string& name, Term& body) {
    if (t->kind != Kind::lam) return false;
    const Term& l = t->first;
    if (l->kind != Kind::let_bang || l->first->kind != Kind::var || l->first->name != t->name) return false;
    name = l->name;
    body = l->second;
    return true;
}

// §(λz.f₁(…(fₙ z))), collecting f₁…fₙ.
bool match_iterate(const Term& t, std::vector<std::string>& fs) {
    if (t->kind != Kind::para || t->first->kind != Kind::lam) return false;
    const std::string& z = t->first->name;
    Term cur = t->first->first;
    while (cur->kind == Kind::app) {
        if (cur->first->kind != Kind::var) return false;
        fs.push_back(cur->first->name);
        cur = cur->second;
    }
    return cur->kind == Kind::var && cur->name == z;
}

}  // namespace

std::optional<unsigned> decode_nat(const Program& p) {
    auto q = prepare(p);
    if (!q) return std::nullopt;
    std::string f;
    Term body;
    std::vector<std::string> fs;
    if (!match_bang_binder(*q, f, body) || !match_iterate(body, fs)) return std::nullopt;
    for (const auto& g : fs)
        if (g != f) return std::nullopt;
    return static_cast<unsigned>(fs.size());
}

std::optional<std::string> decode_word(const Program& p) {
    auto q = prepare(p);
    if (!q) return std::nullopt;
    std::string x0, x1;
    Term b0, b1;
    std::vector<std::string> fs;
    if (!match_bang_binder(*q, x0, b0) || !match_bang_binder(b0, x1, b1) || !match_iterate(b1, fs))
        return std::nullopt;
    if (x0 == x1) return std::nullopt;
    std::string w;
    for (const auto& g : fs) {
        if (g == x0)
            w += '0';
        else if (g == x1)
            w += '1';
        else
            return std::nullopt;
    }
    return w;
}

Program z_term() { return P("\\!x. !(x x)"); }
Program y_term() { return P("\\!x. $(x x)"); }

Program chain(const Term& f, unsigned n, const Term& base) {
    Term t = base;
    for (unsigned i = 0; i < n; ++i) t = term::app(f, t);
    return t;
}

Program zprime_term() {
    Program f = P("\\x. let $x = x in (\\z. (set(#gr, z) || !get(#r))) $set(#r, x)");
    using namespace term;
    return lam_bang("x", app(f, para(app(var("x"), var("x")))));
}

SourceFile zprime_chain(unsigned n) {
    SourceFile s;
    s.program = chain(zprime_term(), n, term::bang(term::unit()));
    s.regions.declare("r", 1);
    s.regions.declare("gr", 0);
    return s;
}

Program update() {
    std::string add2 = "(" + print(add()) + ") (" + print(nat(2)) + ")";
    return P(std::string("\\!x:") + kNatLoc + ". \\$z:$1. $(set(x, let !y = get(x) in !((" + add2 +
             ") y)) || z)");
}

namespace {

Type loc_type() { return parse_type("Reg #r !Nat", aliases()); }

Program xyz_list() {
    using namespace term;
    return list({bang(var("x")), bang(var("y")), bang(var("z"))}, ty::bang(loc_type()));
}

std::string paren(const Program& p) { return "(" + print(p) + ")"; }

SourceFile with_stores(Program prog, unsigned m, unsigned n, unsigned p, unsigned depth) {
    using namespace term;
    SourceFile s;
    s.regions.declare("r", depth, parse_type("!Nat", aliases()));
    s.aliases = aliases();
    for (const char* x : {"x", "y", "z"}) s.locations[x] = loc_type();
    s.program = par(std::vector<Term>{prog, store_loc("x", bang(nat(m))), store_loc("y", bang(nat(n))),
                                      store_loc("z", bang(nat(p)))});
    return s;
}

}  // namespace

Program run_term() {
    return P(paren(list_it()) + " [" + kNatLoc + "] [$1] !" + paren(update()) + " " + paren(xyz_list()) +
             " $$*");
}

Program gen_threads() { return P("gen t. gen t2. \\!f:!(t -o t2). \\!x:!t. ($(f x) || $(f x) || $(f x))"); }

Program run_threads_term() {
    std::string L = std::string("List (") + kNatLoc + ")";
    Program F = P("\\l:" + L + ". " + paren(list_it()) + " [" + kNatLoc + "] [$1] !" + paren(update()) +
                  " l $$*");
    return P(paren(gen_threads()) + " [" + L + "] [$$1] !" + paren(F) + " !" + paren(xyz_list()));
}

SourceFile build_run(unsigned m, unsigned n, unsigned p, unsigned depth) {
    return with_stores(run_term(), m, n, p, depth);
}

SourceFile build_run_threads(unsigned m, unsigned n, unsigned p, unsigned depth) {
    return with_stores(run_threads_term(), m, n, p, depth);
}

}  // namespace lmt::enc
