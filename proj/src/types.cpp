#include "lmt/types.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <sstream>

namespace lmt {

namespace ty {

namespace {
Type make(TypeKind k, std::string name = {}, Type l = nullptr, Type r = nullptr) {
    return std::make_shared<const TypeNode>(TypeNode{k, std::move(name), std::move(l), std::move(r), {}, {}});
}
}  // namespace

Type behaviour() { return make(TypeKind::behaviour); }
Type unit() { return make(TypeKind::unit); }
Type var(std::string name) { return make(TypeKind::var, std::move(name)); }

Type arrow(Type dom, Type cod, Effect e1, Effect e2) {
    return std::make_shared<const TypeNode>(
        TypeNode{TypeKind::arrow, {}, std::move(dom), std::move(cod), std::move(e1), std::move(e2)});
}

Type bang(Type body) { return make(TypeKind::bang, {}, std::move(body)); }
Type para(Type body) { return make(TypeKind::para, {}, std::move(body)); }
Type forall(std::string binder, Type body) { return make(TypeKind::forall, std::move(binder), std::move(body)); }
Type region(std::string r, Type content) { return make(TypeKind::region, std::move(r), std::move(content)); }

}  // namespace ty

bool is_result_type(const Type& t) { return t && t->kind != TypeKind::behaviour; }

namespace {

void collect_ftv(const Type& t, std::set<std::string>& bound, std::set<std::string>& out) {
    if (!t) return;
    switch (t->kind) {
    case TypeKind::var:
        if (!bound.count(t->name)) out.insert(t->name);
        return;
    case TypeKind::forall: {
        bool fresh = bound.insert(t->name).second;
        collect_ftv(t->left, bound, out);
        if (fresh) bound.erase(t->name);
        return;
    }
    default:
        collect_ftv(t->left, bound, out);
        collect_ftv(t->right, bound, out);
    }
}

void collect_regions(const Type& t, std::set<std::string>& out) {
    if (!t) return;
    if (t->kind == TypeKind::region) out.insert(t->name);
    collect_regions(t->left, out);
    collect_regions(t->right, out);
}

Type rebuild(const Type& t, Type l, Type r) {
    auto copy = std::make_shared<TypeNode>(*t);
    copy->left = std::move(l);
    copy->right = std::move(r);
    return copy;
}

bool equal_rec(const Type& a, const Type& b, std::map<std::string, int>& la, std::map<std::string, int>& lb,
               int depth) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case TypeKind::behaviour:
    case TypeKind::unit:
        return true;
    case TypeKind::var: {
        auto ia = la.find(a->name);
        auto ib = lb.find(b->name);
        if (ia == la.end() && ib == lb.end()) return a->name == b->name;
        return ia != la.end() && ib != lb.end() && ia->second == ib->second;
    }
    case TypeKind::forall: {
        auto saved_a = la.count(a->name) ? std::optional<int>(la[a->name]) : std::nullopt;
        auto saved_b = lb.count(b->name) ? std::optional<int>(lb[b->name]) : std::nullopt;
        la[a->name] = depth;
        lb[b->name] = depth;
        bool eq = equal_rec(a->left, b->left, la, lb, depth + 1);
        if (saved_a) la[a->name] = *saved_a; else la.erase(a->name);
        if (saved_b) lb[b->name] = *saved_b; else lb.erase(b->name);
        return eq;
    }
    case TypeKind::region:
        return a->name == b->name && equal_rec(a->left, b->left, la, lb, depth);
    default:
        return equal_rec(a->left, b->left, la, lb, depth) && equal_rec(a->right, b->right, la, lb, depth);
    }
}

std::string effect_string(const Effect& e) {
    std::string out;
    for (const auto& r : e) {
        if (!out.empty()) out += ",";
        out += "#" + r;
    }
    return out;
}

void print(std::ostream& os, const Type& t, int level) {
    if (!t) {
        os << "?";
        return;
    }
    switch (t->kind) {
    case TypeKind::behaviour: os << "B"; return;
    case TypeKind::unit: os << "1"; return;
    case TypeKind::var: os << t->name; return;
    case TypeKind::forall:
        if (level > 0) os << "(";
        os << "forall " << t->name << ". ";
        print(os, t->left, 0);
        if (level > 0) os << ")";
        return;
    case TypeKind::arrow:
        if (level > 0) os << "(";
        print(os, t->left, 1);
        os << " -o";
        if (!t->eff_in.empty() || !t->eff_out.empty())
            os << "{" << effect_string(t->eff_in) << ";" << effect_string(t->eff_out) << "}";
        os << " ";
        print(os, t->right, 0);
        if (level > 0) os << ")";
        return;
    case TypeKind::bang: os << "!"; print(os, t->left, 1); return;
    case TypeKind::para: os << "$"; print(os, t->left, 1); return;
    case TypeKind::region:
        os << "Reg #" << t->name << " ";
        print(os, t->left, 1);
        return;
    }
}

}  // namespace

std::set<std::string> free_type_vars(const Type& t) {
    std::set<std::string> bound, out;
    collect_ftv(t, bound, out);
    return out;
}

std::set<std::string> regions_of(const Type& t) {
    std::set<std::string> out;
    collect_regions(t, out);
    return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
    std::string stem = base;
    while (!stem.empty() && (std::isdigit(static_cast<unsigned char>(stem.back())) || stem.back() == '\''))
        stem.pop_back();
    if (stem.empty()) stem = "v";
    for (int i = 1;; ++i) {
        std::string candidate = stem + std::to_string(i);
        if (!avoid.count(candidate)) return candidate;
    }
}

Type subst_type(const Type& a, const Type& b, const std::string& t) {
    if (!a) return a;
    switch (a->kind) {
    case TypeKind::behaviour:
    case TypeKind::unit:
        return a;
    case TypeKind::var:
        return a->name == t ? b : a;
    case TypeKind::forall: {
        if (a->name == t) return a;
        auto fb = free_type_vars(b);
        if (fb.count(a->name)) {
            auto avoid = fb;
            avoid.merge(free_type_vars(a->left));
            avoid.insert(t);
            std::string renamed = fresh_name(a->name, avoid);
            Type body = subst_type(a->left, ty::var(renamed), a->name);
            return ty::forall(renamed, subst_type(body, b, t));
        }
        return rebuild(a, subst_type(a->left, b, t), nullptr);
    }
    default:
        return rebuild(a, subst_type(a->left, b, t), subst_type(a->right, b, t));
    }
}

bool type_equal(const Type& a, const Type& b) {
    std::map<std::string, int> la, lb;
    return equal_rec(a, b, la, lb, 0);
}

std::string to_string(const Type& t) {
    std::ostringstream os;
    print(os, t, 0);
    return os.str();
}

}  // namespace lmt
