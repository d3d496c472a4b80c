#include "lmt/refs.hpp"

#include "lmt/parse.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_set>

namespace lmt::refs {

namespace {

unsigned no_store_depth(const Node&) { return 0; }

std::set<std::string> names_in_use(const NuState& s) {
    std::set<std::string> out = free_vars(s.program);
    for (const auto& [x, _] : s.locations) out.insert(x);
    for_each_occurrence(s.program, [&](const Address&, const Node& n) {
        if (n.kind == Kind::lam || n.kind == Kind::let_bang || n.kind == Kind::let_para || n.kind == Kind::nu)
            out.insert(n.name);
    });
    return out;
}

// A value whose free variables are all locations.
bool closed_value(const Term& v, const Locations& locs) {
    if (!is_value(v)) return false;
    for (const auto& x : free_vars(v))
        if (!locs.count(x)) return false;
    return true;
}

std::optional<Address> store_of(const Program& p, const std::string& x) {
    std::optional<Address> out;
    std::function<void(const Term&, Address)> walk = [&](const Term& t, Address w) {
        if (out) return;
        const Node& n = *strip(t);
        if (n.kind == Kind::par) {
            walk(n.first, w.child(0));
            walk(n.second, w.child(1));
        } else if (n.kind == Kind::store && n.var_target && n.name == x) {
            out = w;
        }
    };
    walk(p, Address{});
    return out;
}

}  // namespace

std::optional<Term> lookup(const Program& p, const std::string& x) {
    auto w = store_of(p, x);
    if (!w) return std::nullopt;
    return at(p, *w)->first;
}

NuState normalize(const NuState& s, Relation rel) {
    NuState out = s;
    while (true) {
        std::optional<Address> found;
        for_each_hole(out.program, rel, no_store_depth, [&](const Address& w, const Node& n, unsigned) {
            if (!found && n.kind == Kind::nu) found = w;
        });
        if (!found) return out;
        const Term& nu = at(out.program, *found);
        std::string fresh = fresh_name(nu->name, names_in_use(out));
        if (!nu->annot) throw std::invalid_argument("ν-binder " + nu->name + " has no type");
        out.locations[fresh] = nu->annot;
        out.program = replace_at(out.program, *found, substitute(nu->first, nu->name, term::var(fresh)));
    }
}

std::vector<Redex> find_redexes(const NuState& s, Relation rel) {
    std::vector<Redex> out = lmt::find_redexes(s.program, rel, RegionContext{});
    for_each_hole(s.program, rel, no_store_depth, [&](const Address& w, const Node& n, unsigned d) {
        if (!n.var_target || !s.locations.count(n.name)) return;
        if (n.kind == Kind::get) {
            if (auto st = store_of(s.program, n.name)) out.push_back({Rule::get, w, d, st});
        } else if (n.kind == Kind::set && closed_value(n.first, s.locations)) {
            out.push_back({Rule::set, w, d, store_of(s.program, n.name)});
        }
    });
    std::sort(out.begin(), out.end(), [](const Redex& a, const Redex& b) {
        if (a.address != b.address) return a.address < b.address;
        return a.store < b.store;
    });
    return out;
}

NuState step(const NuState& s, const Redex& r, Relation rel) {
    NuState out = s;
    const Node& n = *at(s.program, r.address);
    bool loc = n.var_target && s.locations.count(n.name);
    if (r.rule == Rule::get && loc) {
        if (n.kind != Kind::get || !r.store) throw StaleRedex("stale get redex at " + r.address.to_string());
        out.program = replace_at(s.program, r.address, at(s.program, *r.store)->first);
    } else if (r.rule == Rule::set && loc) {
        if (n.kind != Kind::set) throw StaleRedex("stale set redex at " + r.address.to_string());
        Program p = replace_at(s.program, r.address, term::unit());
        Term written = term::store_loc(n.name, n.first);
        out.program = r.store ? replace_at(p, *r.store, written) : term::par(p, written);
    } else {
        out.program = lmt::step(s.program, r);
    }
    return normalize(out, rel);
}

NuRun run(const NuState& s, Relation rel, Strategy strat, std::size_t fuel) {
    NuRun res;
    res.initial = normalize(s, rel);
    NuState cur = res.initial;
    Scheduler sched(strat);
    for (std::size_t i = 0; i < fuel; ++i) {
        auto rs = find_redexes(cur, rel);
        if (rs.empty()) {
            res.halted = true;
            break;
        }
        const Redex& r = rs[sched.choose(rs)];
        NuStep st;
        st.redex = r;
        if (r.rule == Rule::set && r.store) st.overwritten = at(cur.program, *r.store)->first;
        cur = step(cur, r, rel);
        st.after = cur;
        res.steps.push_back(std::move(st));
    }
    res.final_state = cur;
    if (res.halted) {
        for_each_hole(cur.program, rel, no_store_depth, [&](const Address&, const Node& n, unsigned) {
            if (n.kind == Kind::get && n.var_target && cur.locations.count(n.name) && !store_of(cur.program, n.name))
                res.unassigned_reads.push_back(n.name);
        });
    }
    return res;
}

// ---------------------------------------------------------------------------
// Translation

namespace {

std::string region_of_location(const std::string& x, const Type& t) {
    if (!t || t->kind != TypeKind::region)
        throw TranslationError("location " + x + " does not have a region type");
    if (!t->left || t->left->kind != TypeKind::bang)
        throw TranslationError("location " + x + " holds " + to_string(t->left) +
                               ", reads can only be translated for contents of type !A");
    return t->name;
}

// Checks the annotation of a binder that stands for a location, if any.
void check_binder_type(const std::string& x, Type t) {
    if (!t) return;
    if (t->kind == TypeKind::bang) t = t->left;
    if (t->kind == TypeKind::region) region_of_location(x, t);
}

class Translator {
public:
    Term go(const Term& t, const std::map<std::string, std::string>& env) {
        const Node& n = *t;
        switch (n.kind) {
        case Kind::var: {
            auto it = env.find(n.name);
            return it == env.end() ? t : term::region(it->second);
        }
        case Kind::get: {
            Term target = resolve_get(n, env);
            std::string y = fresh_name("y", {n.name});
            Term again = target->var_target ? term::set_loc(target->name, term::bang(term::var(y)))
                                            : term::set(target->name, term::bang(term::var(y)));
            return term::let_bang(y, target, term::par(again, term::bang(term::var(y))));
        }
        case Kind::set:
        case Kind::store: {
            Term v = go(n.first, env);
            auto it = n.var_target ? env.find(n.name) : env.end();
            if (it != env.end())
                return n.kind == Kind::set ? term::set(it->second, v) : term::store(it->second, v);
            return with_children(t, v, nullptr);
        }
        case Kind::nu: {
            auto inner = env;
            inner[n.name] = region_of_location(n.name, n.annot);
            return go(n.first, inner);
        }
        case Kind::lam: {
            check_binder_type(n.name, n.annot);
            return with_children(t, go(n.first, shadow(env, n.name)), nullptr);
        }
        case Kind::let_bang:
        case Kind::let_para:
            return with_children(t, go(n.first, env), go(n.second, shadow(env, n.name)));
        default: {
            Term a = n.first ? go(n.first, env) : nullptr;
            Term b = n.second ? go(n.second, env) : nullptr;
            return with_children(t, a, b);
        }
        }
    }

private:
    static std::map<std::string, std::string> shadow(const std::map<std::string, std::string>& env,
                                                     const std::string& x) {
        if (!env.count(x)) return env;
        auto out = env;
        out.erase(x);
        return out;
    }

    static Term resolve_get(const Node& n, const std::map<std::string, std::string>& env) {
        if (!n.var_target) return term::get(n.name);
        auto it = env.find(n.name);
        return it == env.end() ? term::get_loc(n.name) : term::get(it->second);
    }
};

}  // namespace

Program translate(const NuState& s) {
    std::map<std::string, std::string> env;
    for (const auto& [x, t] : s.locations) env[x] = region_of_location(x, t);
    return Translator{}.go(s.program, env);
}

// ---------------------------------------------------------------------------
// Simulation

SimulationReport check_simulation(const NuRun& run, const RegionContext& R, Relation rel, std::size_t max_steps) {
    SimulationReport rep;
    rep.nu_steps = run.steps.size();
    Program cur = translate(run.initial);
    std::vector<Term> garbage;
    for (std::size_t k = 0; k < run.steps.size(); ++k) {
        const NuStep& st = run.steps[k];
        if (st.overwritten) {
            const Node& n = *at(k == 0 ? run.initial.program : run.steps[k - 1].after.program, st.redex.address);
            std::string r = region_of_location(n.name, st.after.locations.at(n.name));
            garbage.push_back(term::store(r, translate(NuState{st.overwritten, st.after.locations})));
        }
        std::vector<Term> parts{translate(st.after)};
        parts.insert(parts.end(), garbage.begin(), garbage.end());
        Program target = term::par(parts);
        std::string want = canonical_form(target);

        bool exact = st.redex.rule != Rule::get;
        std::vector<Program> frontier{cur};
        std::unordered_set<std::string> seen{canonical_form(cur)};
        std::optional<Program> hit;
        std::size_t level = 0;
        while (!hit && level < (exact ? 1 : max_steps) && !frontier.empty()) {
            ++level;
            std::vector<Program> next;
            for (const auto& q : frontier) {
                for (const auto& r : lmt::find_redexes(q, rel, R)) {
                    Program q2 = lmt::step(q, r);
                    std::string c = canonical_form(q2);
                    if (c == want) {
                        hit = q2;
                        break;
                    }
                    if (seen.insert(c).second) next.push_back(q2);
                }
                if (hit) break;
            }
            frontier = std::move(next);
        }
        if (!hit) {
            rep.ok = false;
            rep.failure = "ν step " + std::to_string(k + 1) + " (" + rule_name(st.redex.rule) + ") is not matched within " +
                          std::to_string(exact ? 1 : max_steps) + " region step(s); expected " + print(target);
            return rep;
        }
        rep.region_steps.push_back(level);
        cur = *hit;
    }
    return rep;
}

}  // namespace lmt::refs
