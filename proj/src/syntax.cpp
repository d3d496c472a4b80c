#include "lmt/syntax.hpp"

#include <algorithm>
#include <sstream>

namespace lmt {

namespace term {

namespace {
Term make(Kind k, std::string name = {}, Term a = nullptr, Term b = nullptr, Type annot = nullptr,
          bool var_target = false) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->name = std::move(name);
    n->var_target = var_target;
    n->annot = std::move(annot);
    n->first = std::move(a);
    n->second = std::move(b);
    return n;
}
}  // namespace

Term var(std::string x) { return make(Kind::var, std::move(x)); }
Term region(std::string r) { return make(Kind::region, std::move(r)); }
Term unit() { return make(Kind::unit); }
Term lam(std::string x, Term body, Type annot) { return make(Kind::lam, std::move(x), std::move(body), nullptr, std::move(annot)); }
Term app(Term fun, Term arg) { return make(Kind::app, {}, std::move(fun), std::move(arg)); }

Term app(std::initializer_list<Term> spine) {
    auto it = spine.begin();
    Term acc = *it++;
    for (; it != spine.end(); ++it) acc = app(acc, *it);
    return acc;
}

Term bang(Term body) { return make(Kind::bang, {}, std::move(body)); }
Term para(Term body) { return make(Kind::para, {}, std::move(body)); }
Term let_bang(std::string x, Term bound, Term body) { return make(Kind::let_bang, std::move(x), std::move(bound), std::move(body)); }
Term let_para(std::string x, Term bound, Term body) { return make(Kind::let_para, std::move(x), std::move(bound), std::move(body)); }
Term get(std::string r) { return make(Kind::get, std::move(r)); }
Term set(std::string r, Term value) { return make(Kind::set, std::move(r), std::move(value)); }
Term store(std::string r, Term value) { return make(Kind::store, std::move(r), std::move(value)); }
Term get_loc(std::string x) { return make(Kind::get, std::move(x), nullptr, nullptr, nullptr, true); }
Term set_loc(std::string x, Term value) { return make(Kind::set, std::move(x), std::move(value), nullptr, nullptr, true); }
Term store_loc(std::string x, Term value) { return make(Kind::store, std::move(x), std::move(value), nullptr, nullptr, true); }
Term par(Term left, Term right) { return make(Kind::par, {}, std::move(left), std::move(right)); }

Term par(const std::vector<Term>& threads) {
    if (threads.empty()) throw std::invalid_argument("empty parallel composition");
    Term acc = threads.back();
    for (auto it = threads.rbegin() + 1; it != threads.rend(); ++it) acc = par(*it, acc);
    return acc;
}

Term gen(std::string t, Term body) { return make(Kind::gen, std::move(t), std::move(body)); }
Term inst(Term body, Type arg) { return make(Kind::inst, {}, std::move(body), nullptr, std::move(arg)); }
Term nu(std::string x, Type annot, Term body) { return make(Kind::nu, std::move(x), std::move(body), nullptr, std::move(annot)); }

Term bag(std::size_t copies, Term body) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::bag;
    n->first = std::move(body);
    n->copies = copies;
    return n;
}

Term lam_bang(std::string x, Term body, Type annot) {
    return lam(x, let_bang(x, var(x), std::move(body)), std::move(annot));
}

Term lam_para(std::string x, Term body, Type annot) {
    return lam(x, let_para(x, var(x), std::move(body)), std::move(annot));
}

}  // namespace term

Term with_children(const Term& t, Term first, Term second) {
    if (t->first == first && t->second == second) return t;
    auto copy = std::make_shared<Node>(*t);
    copy->first = std::move(first);
    copy->second = std::move(second);
    return copy;
}

bool is_wrapper(Kind k) { return k == Kind::gen || k == Kind::inst; }

const Term& strip(const Term& t) {
    const Term* cur = &t;
    while (is_wrapper((*cur)->kind)) cur = &(*cur)->first;
    return *cur;
}

int arity(Kind k) {
    switch (k) {
    case Kind::var:
    case Kind::region:
    case Kind::unit:
    case Kind::get:
        return 0;
    case Kind::app:
    case Kind::let_bang:
    case Kind::let_para:
    case Kind::par:
        return 2;
    default:
        return 1;
    }
}

const Term& child(const Node& n, int i) { return i == 0 ? n.first : n.second; }

std::string kind_name(Kind k) {
    switch (k) {
    case Kind::var: return "var";
    case Kind::region: return "region";
    case Kind::unit: return "unit";
    case Kind::lam: return "lambda";
    case Kind::app: return "app";
    case Kind::bang: return "bang";
    case Kind::para: return "paragraph";
    case Kind::let_bang: return "let!";
    case Kind::let_para: return "let$";
    case Kind::get: return "get";
    case Kind::set: return "set";
    case Kind::store: return "store";
    case Kind::par: return "par";
    case Kind::gen: return "gen";
    case Kind::inst: return "inst";
    case Kind::nu: return "nu";
    case Kind::bag: return "bag";
    }
    return "?";
}

// ---------------------------------------------------------------------------

Address Address::parse(const std::string& text) {
    std::vector<std::uint8_t> path;
    if (text == "ε" || text == "e") return Address{};
    for (char c : text) {
        if (c != '0' && c != '1') throw std::invalid_argument("bad address '" + text + "'");
        path.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return Address{std::move(path)};
}

Address Address::child(std::uint8_t i) const {
    auto p = path_;
    p.push_back(i);
    return Address{std::move(p)};
}

Address Address::parent() const {
    if (path_.empty()) throw std::logic_error("root has no parent");
    return Address{std::vector<std::uint8_t>(path_.begin(), path_.end() - 1)};
}

bool Address::is_prefix_of(const Address& other) const {
    return path_.size() <= other.path_.size() && std::equal(path_.begin(), path_.end(), other.path_.begin());
}

std::string Address::to_string() const { return path_.empty() ? "ε" : to_bits(); }

std::string Address::to_bits() const {
    std::string s;
    for (auto b : path_) s.push_back(static_cast<char>('0' + b));
    return s;
}

const Term& at(const Program& p, const Address& w) {
    const Term* cur = &strip(p);
    for (auto i : w.path()) {
        if (i >= arity((*cur)->kind)) throw std::out_of_range("address " + w.to_string() + " is not valid");
        cur = &strip(child(**cur, i));
    }
    return *cur;
}

bool valid_address(const Program& p, const Address& w) {
    const Term* cur = &strip(p);
    for (auto i : w.path()) {
        if (i >= arity((*cur)->kind)) return false;
        cur = &strip(child(**cur, i));
    }
    return true;
}

namespace {

Term replace_rec(const Term& t, const Address& w, std::size_t idx, const Term& repl) {
    if (is_wrapper(t->kind)) return with_children(t, replace_rec(t->first, w, idx, repl), nullptr);
    if (idx == w.size()) return repl;
    auto i = w.path()[idx];
    if (i >= arity(t->kind)) throw std::out_of_range("address " + w.to_string() + " is not valid");
    if (i == 0) return with_children(t, replace_rec(t->first, w, idx + 1, repl), t->second);
    return with_children(t, t->first, replace_rec(t->second, w, idx + 1, repl));
}

void visit_rec(const Term& t, Address& addr, const std::function<void(const Address&, const Node&)>& visit) {
    const Node& n = *strip(t);
    visit(addr, n);
    for (int i = 0; i < arity(n.kind); ++i) {
        addr = addr.child(static_cast<std::uint8_t>(i));
        visit_rec(child(n, i), addr, visit);
        addr = addr.parent();
    }
}

}  // namespace

Program replace_at(const Program& p, const Address& w, Term replacement) {
    return replace_rec(p, w, 0, replacement);
}

void for_each_occurrence(const Program& p, const std::function<void(const Address&, const Node&)>& visit) {
    Address addr;
    visit_rec(p, addr, visit);
}

std::map<Address, Kind> occurrences(const Program& p) {
    std::map<Address, Kind> out;
    for_each_occurrence(p, [&](const Address& w, const Node& n) { out.emplace(w, n.kind); });
    return out;
}

// ---------------------------------------------------------------------------

RegionContext::RegionContext(std::initializer_list<std::pair<const std::string, unsigned>> depths) {
    for (const auto& [r, d] : depths) declare(r, d);
}

void RegionContext::declare(const std::string& r, unsigned depth, Type content) {
    if (!entries_.emplace(r, RegionInfo{depth, std::move(content)}).second)
        throw std::invalid_argument("region #" + r + " declared twice");
}

unsigned RegionContext::depth(const std::string& r) const {
    auto it = entries_.find(r);
    if (it == entries_.end()) throw MissingRegion(r);
    return it->second.depth;
}

Type RegionContext::content(const std::string& r) const {
    auto it = entries_.find(r);
    if (it == entries_.end()) throw MissingRegion(r);
    return it->second.content;
}

std::string RegionContext::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [r, info] : entries_) {
        if (!first) os << ", ";
        first = false;
        os << "#" << r << ":";
        if (info.content)
            os << "(" << info.depth << ", " << lmt::to_string(info.content) << ")";
        else
            os << info.depth;
    }
    return os.str();
}

std::set<std::string> regions_of(const Program& p) {
    std::set<std::string> out;
    for_each_occurrence(p, [&](const Address&, const Node& n) {
        if (n.kind == Kind::region) out.insert(n.name);
        if ((n.kind == Kind::get || n.kind == Kind::set || n.kind == Kind::store) && !n.var_target)
            out.insert(n.name);
    });
    return out;
}

namespace {

unsigned label_weight(const Node& n, const RegionContext& R) {
    switch (n.kind) {
    case Kind::bang:
    case Kind::para:
        return 1;
    case Kind::store:
        if (n.var_target) throw std::invalid_argument("depth of a location store is undefined; translate first");
        return R.depth(n.name);
    default:
        return 0;
    }
}

std::size_t node_weight(const Node& n, SizeConvention c) {
    if (c == SizeConvention::plain) return n.kind == Kind::bag ? 0 : 1;
    switch (n.kind) {
    case Kind::par:
    case Kind::store:
    case Kind::bag:
        return 0;
    case Kind::set:
        return 2;
    default:
        return 1;
    }
}

std::size_t size_rec(const Term& t, SizeConvention c) {
    const Node& n = *strip(t);
    if (n.kind == Kind::bag) return n.copies * size_rec(n.first, c);
    std::size_t s = node_weight(n, c);
    for (int i = 0; i < arity(n.kind); ++i) s += size_rec(child(n, i), c);
    return s;
}

std::size_t size_at_rec(const Term& t, unsigned d, unsigned i, const RegionContext& R, SizeConvention c) {
    const Node& n = *strip(t);
    if (n.kind == Kind::bag) return n.copies * size_at_rec(n.first, d, i, R, c);
    std::size_t s = d == i ? node_weight(n, c) : 0;
    unsigned below = d + label_weight(n, R);
    for (int k = 0; k < arity(n.kind); ++k) s += size_at_rec(child(n, k), below, i, R, c);
    return s;
}

unsigned depth_rec(const Term& t, unsigned d, const RegionContext& R) {
    const Node& n = *strip(t);
    unsigned best = d;
    unsigned below = d + label_weight(n, R);
    for (int k = 0; k < arity(n.kind); ++k) best = std::max(best, depth_rec(child(n, k), below, R));
    return best;
}

}  // namespace

unsigned depth_of(const Program& p, const Address& w, const RegionContext& R) {
    unsigned d = 0;
    const Term* cur = &strip(p);
    for (auto i : w.path()) {
        if (i >= arity((*cur)->kind)) throw std::out_of_range("address " + w.to_string() + " is not valid");
        d += label_weight(**cur, R);
        cur = &strip(child(**cur, i));
    }
    return d;
}

unsigned depth(const Program& p, const RegionContext& R) { return depth_rec(p, 0, R); }

std::size_t size(const Program& p, SizeConvention c) { return size_rec(p, c); }

std::size_t size_at(const Program& p, unsigned i, const RegionContext& R, SizeConvention c) {
    return size_at_rec(p, 0, i, R, c);
}

// ---------------------------------------------------------------------------

namespace {

bool binds_in_body(Kind k) {
    return k == Kind::lam || k == Kind::let_bang || k == Kind::let_para || k == Kind::nu;
}

// The child index a binder scopes over.
int body_index(Kind k) { return (k == Kind::let_bang || k == Kind::let_para) ? 1 : 0; }

bool is_target_node(const Node& n) {
    return (n.kind == Kind::get || n.kind == Kind::set || n.kind == Kind::store) && n.var_target;
}

template <typename F>
void free_occurrences(const Term& t, std::vector<std::string>& bound, F&& on_free, std::size_t mult = 1) {
    const Node& n = *t;
    auto is_bound = [&](const std::string& x) { return std::find(bound.begin(), bound.end(), x) != bound.end(); };
    if (n.kind == Kind::var || is_target_node(n)) {
        if (!is_bound(n.name)) on_free(n.name, mult);
    }
    if (n.kind == Kind::bag) {
        free_occurrences(n.first, bound, on_free, mult * n.copies);
        return;
    }
    if (is_wrapper(n.kind)) {
        free_occurrences(n.first, bound, on_free, mult);
        return;
    }
    for (int i = 0; i < arity(n.kind); ++i) {
        bool scoped = binds_in_body(n.kind) && i == body_index(n.kind);
        if (scoped) bound.push_back(n.name);
        free_occurrences(child(n, i), bound, on_free, mult);
        if (scoped) bound.pop_back();
    }
}

}  // namespace

std::set<std::string> free_vars(const Program& p) {
    std::set<std::string> out;
    std::vector<std::string> bound;
    free_occurrences(p, bound, [&](const std::string& x, std::size_t) { out.insert(x); });
    return out;
}

std::size_t count_occ(const std::string& x, const Program& p) {
    std::size_t count = 0;
    std::vector<std::string> bound;
    free_occurrences(p, bound, [&](const std::string& y, std::size_t m) {
        if (y == x) count += m;
    });
    return count;
}

std::size_t count_all_free(const Program& p, const std::set<std::string>& constants) {
    std::size_t count = 0;
    std::vector<std::string> bound;
    free_occurrences(p, bound, [&](const std::string& y, std::size_t m) {
        if (!constants.count(y)) count += m;
    });
    return count;
}

namespace {

void collect_term_ftv(const Term& t, std::set<std::string>& bound, std::set<std::string>& out) {
    const Node& n = *t;
    if (n.annot) {
        for (const auto& v : lmt::free_type_vars(n.annot))
            if (!bound.count(v)) out.insert(v);
    }
    if (n.kind == Kind::gen) {
        bool fresh = bound.insert(n.name).second;
        collect_term_ftv(n.first, bound, out);
        if (fresh) bound.erase(n.name);
        return;
    }
    if (n.first) collect_term_ftv(n.first, bound, out);
    if (n.second) collect_term_ftv(n.second, bound, out);
}

struct Substituter {
    const std::string& x;
    const Term& n;
    std::set<std::string> fv_n;
    std::set<std::string> ftv_n;

    Term retarget(const Term& t) const {
        const Term& s = strip(n);
        auto copy = std::make_shared<Node>(*t);
        if (s->kind == Kind::var) {
            copy->name = s->name;
            copy->var_target = true;
        } else if (s->kind == Kind::region) {
            copy->name = s->name;
            copy->var_target = false;
        } else {
            throw std::invalid_argument("cannot substitute a non-location term for the target of " + kind_name(t->kind));
        }
        return copy;
    }

    Term run(const Term& t) const {
        const Node& node = *t;
        switch (node.kind) {
        case Kind::var:
            return node.name == x ? n : t;
        case Kind::region:
        case Kind::unit:
            return t;
        case Kind::get:
            return (node.var_target && node.name == x) ? retarget(t) : t;
        case Kind::set:
        case Kind::store: {
            Term body = run(node.first);
            Term out = with_children(t, body, nullptr);
            return (node.var_target && node.name == x) ? retarget(out) : out;
        }
        case Kind::lam:
        case Kind::nu:
        case Kind::let_bang:
        case Kind::let_para: {
            int bi = body_index(node.kind);
            Term bound_part = bi == 1 ? run(node.first) : nullptr;
            const Term& body = child(node, bi);
            Term new_body;
            std::string binder = node.name;
            if (binder == x) {
                new_body = body;
            } else if (fv_n.count(binder)) {
                std::set<std::string> avoid = fv_n;
                avoid.merge(free_vars(body));
                avoid.insert(x);
                binder = fresh_name(binder, avoid);
                new_body = run(substitute(body, node.name, term::var(binder)));
            } else {
                new_body = run(body);
            }
            auto copy = std::make_shared<Node>(node);
            copy->name = binder;
            if (bi == 1) {
                copy->first = bound_part;
                copy->second = new_body;
            } else {
                copy->first = new_body;
            }
            return copy;
        }
        case Kind::gen: {
            if (ftv_n.count(node.name)) {
                std::set<std::string> avoid = ftv_n;
                avoid.merge(free_type_vars(node.first));
                std::string renamed = fresh_name(node.name, avoid);
                Term body = substitute_type(node.first, node.name, ty::var(renamed));
                auto copy = std::make_shared<Node>(node);
                copy->name = renamed;
                copy->first = run(body);
                return copy;
            }
            return with_children(t, run(node.first), nullptr);
        }
        default:
            return with_children(t, node.first ? run(node.first) : nullptr, node.second ? run(node.second) : nullptr);
        }
    }
};

}  // namespace

std::set<std::string> free_type_vars(const Term& m) {
    std::set<std::string> bound, out;
    collect_term_ftv(m, bound, out);
    return out;
}

Term substitute(const Term& m, const std::string& x, const Term& n) {
    Substituter s{x, n, free_vars(n), free_type_vars(n)};
    return s.run(m);
}

Term substitute_type(const Term& m, const std::string& t, const Type& b) {
    const Node& node = *m;
    if (node.kind == Kind::gen) {
        if (node.name == t) return m;
        auto fb = lmt::free_type_vars(b);
        if (fb.count(node.name)) {
            auto avoid = fb;
            avoid.merge(free_type_vars(node.first));
            avoid.insert(t);
            std::string renamed = fresh_name(node.name, avoid);
            Term body = substitute_type(node.first, node.name, ty::var(renamed));
            auto copy = std::make_shared<Node>(node);
            copy->name = renamed;
            copy->first = substitute_type(body, t, b);
            return copy;
        }
    }
    Term first = node.first ? substitute_type(node.first, t, b) : nullptr;
    Term second = node.second ? substitute_type(node.second, t, b) : nullptr;
    Type annot = node.annot ? subst_type(node.annot, b, t) : nullptr;
    if (first == node.first && second == node.second && annot == node.annot) return m;
    auto copy = std::make_shared<Node>(node);
    copy->first = std::move(first);
    copy->second = std::move(second);
    copy->annot = std::move(annot);
    return copy;
}

Program erase(const Program& p) {
    const Node& n = *strip(p);
    Term first = n.first ? erase(n.first) : nullptr;
    Term second = n.second ? erase(n.second) : nullptr;
    auto copy = std::make_shared<Node>(n);
    copy->first = std::move(first);
    copy->second = std::move(second);
    if (n.kind == Kind::lam) copy->annot = nullptr;
    return copy;
}

bool has_annotation_nodes(const Program& p) {
    const Node& n = *p;
    if (is_wrapper(n.kind) || (n.kind == Kind::lam && n.annot)) return true;
    return (n.first && has_annotation_nodes(n.first)) || (n.second && has_annotation_nodes(n.second));
}

bool is_value(const Term& t) {
    const Node& n = *strip(t);
    switch (n.kind) {
    case Kind::var:
    case Kind::unit:
    case Kind::region:
    case Kind::lam:
        return true;
    case Kind::bang:
    case Kind::para:
        return is_value(n.first);
    default:
        return false;
    }
}

// ---------------------------------------------------------------------------

namespace {

struct Canon {
    bool flatten;
    std::vector<std::string> scope;

    std::string name_of(const std::string& x) const {
        for (std::size_t i = scope.size(); i-- > 0;)
            if (scope[i] == x) return "v" + std::to_string(i);
        return "f:" + x;
    }

    void chain(const Term& t, std::vector<std::string>& out) {
        const Node& n = *strip(t);
        if (n.kind == Kind::par) {
            chain(n.first, out);
            chain(n.second, out);
        } else {
            out.push_back(run(t));
        }
    }

    std::string target(const Node& n) const { return n.var_target ? name_of(n.name) : "r:" + n.name; }

    std::string bind(const std::string& binder, const Term& body) {
        scope.push_back(binder);
        std::string s = run(body);
        scope.pop_back();
        return s;
    }

    std::string run(const Term& t) {
        const Node& n = *strip(t);
        switch (n.kind) {
        case Kind::var: return name_of(n.name);
        case Kind::region: return "r:" + n.name;
        case Kind::unit: return "*";
        case Kind::lam: return "L(" + bind(n.name, n.first) + ")";
        case Kind::app: return "A(" + run(n.first) + "," + run(n.second) + ")";
        case Kind::bang: return "!(" + run(n.first) + ")";
        case Kind::para: return "$(" + run(n.first) + ")";
        case Kind::let_bang: return "LB(" + run(n.first) + "," + bind(n.name, n.second) + ")";
        case Kind::let_para: return "LP(" + run(n.first) + "," + bind(n.name, n.second) + ")";
        case Kind::get: return "G(" + target(n) + ")";
        case Kind::set: return "S(" + target(n) + "," + run(n.first) + ")";
        case Kind::store: return "W(" + target(n) + "," + run(n.first) + ")";
        case Kind::nu: return "N(" + bind(n.name, n.first) + ")";
        case Kind::bag: return "K" + std::to_string(n.copies) + "(" + run(n.first) + ")";
        case Kind::par: {
            if (!flatten) return "P(" + run(n.first) + "," + run(n.second) + ")";
            std::vector<std::string> parts;
            chain(t, parts);
            std::sort(parts.begin(), parts.end());
            std::string s = "P[";
            for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "|" : "") + parts[i];
            return s + "]";
        }
        default:
            throw std::logic_error("unexpected node in canonical form");
        }
    }
};

}  // namespace

std::string canonical_form(const Program& p) {
    Canon c{true, {}};
    return c.run(p);
}

bool struct_equiv(const Program& p, const Program& q) { return canonical_form(p) == canonical_form(q); }

bool alpha_equiv(const Program& p, const Program& q) {
    Canon a{false, {}}, b{false, {}};
    return a.run(p) == b.run(q);
}

std::vector<Term> threads(const Program& p) {
    std::vector<Term> out;
    std::function<void(const Term&)> walk = [&](const Term& t) {
        const Term& s = strip(t);
        if (s->kind == Kind::par) {
            walk(s->first);
            walk(s->second);
        } else {
            out.push_back(t);
        }
    };
    walk(p);
    return out;
}

bool is_store_program(const Term& t) {
    for (const auto& th : threads(t))
        if (strip(th)->kind != Kind::store) return false;
    return true;
}

}  // namespace lmt
