#include "lmt/reduce.hpp"

#include <algorithm>

namespace lmt {

std::string relation_name(Relation r) {
    switch (r) {
    case Relation::full: return "full";
    case Relation::outer_bang: return "outer";
    case Relation::cbv: return "cbv";
    case Relation::cbv_ext: return "cbv-ext";
    }
    return "?";
}

Relation parse_relation(const std::string& s) {
    if (s == "full") return Relation::full;
    if (s == "outer" || s == "outer_bang" || s == "outer-bang") return Relation::outer_bang;
    if (s == "cbv") return Relation::cbv;
    if (s == "cbv-ext" || s == "cbv_ext") return Relation::cbv_ext;
    throw std::invalid_argument("unknown relation '" + s + "'");
}

std::string rule_name(Rule r) {
    switch (r) {
    case Rule::beta: return "beta";
    case Rule::bang: return "bang";
    case Rule::para: return "para";
    case Rule::get: return "get";
    case Rule::set: return "set";
    case Rule::gc: return "gc";
    }
    return "?";
}

Rule parse_rule(const std::string& s) {
    for (Rule r : {Rule::beta, Rule::bang, Rule::para, Rule::get, Rule::set, Rule::gc})
        if (rule_name(r) == s) return r;
    throw std::invalid_argument("unknown rule '" + s + "'");
}

std::string strategy_name(StrategyKind k) {
    switch (k) {
    case StrategyKind::cbv_leftmost: return "cbv";
    case StrategyKind::shallow_first: return "shallow";
    case StrategyKind::random: return "random";
    case StrategyKind::deep_first: return "deepfirst";
    }
    return "?";
}

StrategyKind parse_strategy(const std::string& s) {
    if (s == "cbv" || s == "leftmost") return StrategyKind::cbv_leftmost;
    if (s == "shallow" || s == "shallow-first") return StrategyKind::shallow_first;
    if (s == "random") return StrategyKind::random;
    if (s == "deepfirst" || s == "deep-first") return StrategyKind::deep_first;
    throw std::invalid_argument("unknown strategy '" + s + "'");
}

// ---------------------------------------------------------------------------

std::optional<std::string> cbv_violation(const Program& p) {
    std::optional<std::string> out;
    for_each_occurrence(p, [&](const Address& w, const Node& n) {
        if (out) return;
        if (n.kind == Kind::bang && !is_value(n.first))
            out = "!-term at " + w.to_string() + " is built on a non-value";
        else if (n.kind == Kind::store && !is_value(n.first))
            out = "store at " + w.to_string() + " holds a non-value";
    });
    return out;
}

namespace {

void hole_rec(const Term& t, Address& w, unsigned d, Relation rel,
              const std::function<unsigned(const Node&)>& store_depth,
              const std::function<void(const Address&, const Node&, unsigned)>& visit) {
    const Node& n = *strip(t);
    visit(w, n, d);
    auto descend = [&](int i) {
        unsigned below = d;
        if (n.kind == Kind::bang || n.kind == Kind::para) below += 1;
        if (n.kind == Kind::store) below += store_depth(n);
        w = w.child(static_cast<std::uint8_t>(i));
        hole_rec(child(n, i), w, below, rel, store_depth, visit);
        w = w.parent();
    };
    bool cbv = rel == Relation::cbv || rel == Relation::cbv_ext;
    if (!cbv) {
        if (n.kind == Kind::bang && rel == Relation::outer_bang) return;
        for (int i = 0; i < arity(n.kind); ++i) descend(i);
        return;
    }
    switch (n.kind) {
    case Kind::app:
        descend(0);
        if (is_value(n.first)) descend(1);
        break;
    case Kind::para:
    case Kind::set:
    case Kind::let_bang:
    case Kind::let_para:
    case Kind::nu:
        descend(0);
        break;
    case Kind::bang:
        if (rel == Relation::cbv_ext) descend(0);
        break;
    case Kind::par:
        descend(0);
        descend(1);
        break;
    default:
        break;
    }
}

void top_stores(const Term& t, Address& w, std::vector<std::pair<Address, const Node*>>& out) {
    const Node& n = *strip(t);
    if (n.kind == Kind::par) {
        w = w.child(0);
        top_stores(n.first, w, out);
        w = w.parent().child(1);
        top_stores(n.second, w, out);
        w = w.parent();
    } else if (n.kind == Kind::store) {
        out.emplace_back(w, &n);
    }
}

}  // namespace

void for_each_hole(const Program& p, Relation rel, const std::function<unsigned(const Node&)>& store_depth,
                   const std::function<void(const Address&, const Node&, unsigned)>& visit) {
    Address w;
    hole_rec(p, w, 0, rel, store_depth, visit);
}

std::vector<Redex> find_redexes(const Program& p, Relation rel, const RegionContext& R) {
    if (rel == Relation::cbv) {
        if (auto why = cbv_violation(p)) throw CbvSyntaxError("not in call-by-value syntax: " + *why);
    }
    bool cbv = rel == Relation::cbv || rel == Relation::cbv_ext;
    std::vector<std::pair<Address, const Node*>> stores;
    {
        Address w;
        top_stores(p, w, stores);
    }
    std::vector<Redex> out;
    auto store_depth = [&](const Node& n) -> unsigned {
        if (n.var_target) throw std::invalid_argument("location store in a region program");
        return R.depth(n.name);
    };
    for_each_hole(p, rel, store_depth, [&](const Address& w, const Node& n, unsigned d) {
        switch (n.kind) {
        case Kind::app:
            if (strip(n.first)->kind == Kind::lam && (!cbv || is_value(n.second))) out.push_back({Rule::beta, w, d, {}});
            break;
        case Kind::let_bang:
        case Kind::let_para: {
            Kind want = n.kind == Kind::let_bang ? Kind::bang : Kind::para;
            if (strip(n.first)->kind == want && (!cbv || is_value(n.first)))
                out.push_back({n.kind == Kind::let_bang ? Rule::bang : Rule::para, w, d, {}});
            break;
        }
        case Kind::get:
            if (n.var_target) break;
            for (const auto& [s, store] : stores)
                if (!store->var_target && store->name == n.name && !s.is_prefix_of(w) && (!cbv || is_value(store->first)))
                    out.push_back({Rule::get, w, d, s});
            break;
        case Kind::set:
            if (n.var_target) break;
            if (free_vars(n.first).empty() && (!cbv || is_value(n.first))) out.push_back({Rule::set, w, d, {}});
            break;
        case Kind::par:
            if (strip(n.first)->kind == Kind::unit || strip(n.second)->kind == Kind::unit)
                out.push_back({Rule::gc, w, d, {}});
            break;
        default:
            break;
        }
    });
    std::sort(out.begin(), out.end(), [](const Redex& a, const Redex& b) {
        if (a.address != b.address) return a.address < b.address;
        return a.store < b.store;
    });
    return out;
}

Term peel_instances(const Term& t) {
    if (t->kind == Kind::inst) {
        Term inner = peel_instances(t->first);
        if (inner->kind == Kind::gen) return peel_instances(substitute_type(inner->first, inner->name, t->annot));
        return inner;
    }
    return t;
}

namespace {

// The function or modal value a redex consumes, with type applications
// contracted and unmatched wrappers dropped.
Term core(Term t) {
    while (true) {
        t = peel_instances(t);
        if (t->kind == Kind::gen)
            t = t->first;
        else
            return t;
    }
}

[[noreturn]] void stale(const Redex& r, const std::string& why) {
    throw StaleRedex("stale " + rule_name(r.rule) + " redex at " + r.address.to_string() + ": " + why);
}

Program remove_thread(const Program& p, const Address& s) {
    if (s.empty()) throw StaleRedex("cannot remove the whole program");
    Address parent = s.parent();
    const Term& par = at(p, parent);
    if (par->kind != Kind::par) throw StaleRedex("store at " + s.to_string() + " is not a thread");
    int side = s.path().back();
    return replace_at(p, parent, child(*par, 1 - side));
}

}  // namespace

Program step(const Program& p, const Redex& r) {
    if (!valid_address(p, r.address)) stale(r, "address is not valid");
    const Node& n = *at(p, r.address);
    switch (r.rule) {
    case Rule::beta: {
        if (n.kind != Kind::app) stale(r, "not an application");
        Term f = core(n.first);
        if (f->kind != Kind::lam) stale(r, "not a λ-abstraction in function position");
        return replace_at(p, r.address, substitute(f->first, f->name, n.second));
    }
    case Rule::bang:
    case Rule::para: {
        Kind let = r.rule == Rule::bang ? Kind::let_bang : Kind::let_para;
        Kind mod = r.rule == Rule::bang ? Kind::bang : Kind::para;
        if (n.kind != let) stale(r, "not a let");
        Term b = core(n.first);
        if (b->kind != mod) stale(r, "bound term has the wrong modality");
        return replace_at(p, r.address, substitute(n.second, n.name, b->first));
    }
    case Rule::get: {
        if (n.kind != Kind::get) stale(r, "not a get");
        if (!r.store || !valid_address(p, *r.store)) stale(r, "missing store");
        const Node& s = *at(p, *r.store);
        if (s.kind != Kind::store || s.name != n.name || s.var_target != n.var_target) stale(r, "store does not match");
        if (r.store->is_prefix_of(r.address)) stale(r, "read inside its own store");
        Program p1 = replace_at(p, r.address, s.first);
        return remove_thread(p1, *r.store);
    }
    case Rule::set: {
        if (n.kind != Kind::set) stale(r, "not a set");
        Term written = n.var_target ? term::store_loc(n.name, n.first) : term::store(n.name, n.first);
        return term::par(replace_at(p, r.address, term::unit()), written);
    }
    case Rule::gc: {
        if (n.kind != Kind::par) stale(r, "not a parallel composition");
        if (strip(n.first)->kind == Kind::unit) return replace_at(p, r.address, n.second);
        if (strip(n.second)->kind == Kind::unit) return replace_at(p, r.address, n.first);
        stale(r, "no terminated thread");
    }
    }
    stale(r, "unknown rule");
}

// ---------------------------------------------------------------------------

std::vector<unsigned> Trace::depth_profile() const {
    std::vector<unsigned> out;
    for (const auto& s : steps) out.push_back(s.redex.depth);
    return out;
}

Scheduler::Scheduler(Strategy s) : strat_(s), rng_(s.seed) {}

std::size_t Scheduler::choose(const std::vector<Redex>& redexes) {
    if (redexes.empty()) throw std::logic_error("no redex to choose from");
    switch (strat_.kind) {
    case StrategyKind::cbv_leftmost:
        return 0;
    case StrategyKind::random:
        return std::uniform_int_distribution<std::size_t>(0, redexes.size() - 1)(rng_);
    case StrategyKind::shallow_first:
    case StrategyKind::deep_first: {
        bool shallow = strat_.kind == StrategyKind::shallow_first;
        std::size_t best = 0;
        for (std::size_t i = 1; i < redexes.size(); ++i) {
            bool better = shallow ? redexes[i].depth < redexes[best].depth : redexes[i].depth > redexes[best].depth;
            if (better) best = i;
        }
        if (shallow) {
            if (redexes[best].depth < level_)
                throw ShallowFirstViolation("redex at depth " + std::to_string(redexes[best].depth) +
                                            " appeared while exhausting depth " + std::to_string(level_));
            level_ = redexes[best].depth;
        }
        return best;
    }
    }
    return 0;
}

RunResult run(const Program& p, Relation rel, const RegionContext& R, Strategy strat, RunOptions opts) {
    RunResult out;
    out.trace.initial = p;
    out.trace.regions = R;
    out.trace.relation = rel;
    out.trace.strategy = strat;
    Scheduler sched(strat);
    Program cur = p;
    out.max_plain_size = size(cur, SizeConvention::plain);
    out.max_weighted_size = size(cur, SizeConvention::weighted);
    while (true) {
        auto redexes = find_redexes(cur, rel, R);
        if (redexes.empty()) {
            out.halted = true;
            break;
        }
        if (out.trace.steps.size() >= opts.fuel) break;
        std::size_t i;
        try {
            i = sched.choose(redexes);
        } catch (const ShallowFirstViolation&) {
            if (opts.strict_shallow) throw;
            i = 0;
        }
        cur = step(cur, redexes[i]);
        out.trace.steps.push_back({out.trace.steps.size() + 1, redexes[i], cur, strat.seed});
        out.max_plain_size = std::max(out.max_plain_size, size(cur, SizeConvention::plain));
        out.max_weighted_size = std::max(out.max_weighted_size, size(cur, SizeConvention::weighted));
    }
    out.final_program = cur;
    return out;
}

// ---------------------------------------------------------------------------

bool StuckReport::ok() const { return count(ThreadShape::violation) == 0; }

std::size_t StuckReport::count(ThreadShape s) const {
    return static_cast<std::size_t>(
        std::count_if(threads.begin(), threads.end(), [&](const StuckThread& t) { return t.shape == s; }));
}

namespace {

struct Focus {
    ThreadShape shape;
    std::string region;
    std::string reason;
};

// Follows the call-by-value evaluation position of a non-value term.
Focus focus(const Term& t, const std::set<std::string>& filled) {
    const Node& n = *strip(t);
    auto bad = [](std::string why) { return Focus{ThreadShape::violation, "", std::move(why)}; };
    switch (n.kind) {
    case Kind::app:
        if (!is_value(n.first)) return focus(n.first, filled);
        if (!is_value(n.second)) return focus(n.second, filled);
        return bad("application of a value that is not a λ-abstraction");
    case Kind::para:
        return focus(n.first, filled);
    case Kind::let_bang:
    case Kind::let_para:
        if (!is_value(n.first)) return focus(n.first, filled);
        return bad(std::string("let") + (n.kind == Kind::let_bang ? "!" : "$") + " on a value of the other modality");
    case Kind::set:
        if (!is_value(n.first)) return focus(n.first, filled);
        return bad("assignment that cannot fire");
    case Kind::get:
        if (n.var_target) return bad("read through an unresolved location variable");
        if (filled.count(n.name)) return bad("read on #" + n.name + " although the region holds a value");
        return Focus{ThreadShape::blocked_read, n.name, ""};
    case Kind::par: {
        Focus l = is_value(n.first) ? Focus{ThreadShape::value, "", ""} : focus(n.first, filled);
        Focus r = is_value(n.second) ? Focus{ThreadShape::value, "", ""} : focus(n.second, filled);
        if (l.shape == ThreadShape::violation) return l;
        if (r.shape == ThreadShape::violation) return r;
        if (l.shape == ThreadShape::blocked_read) return l;
        if (r.shape == ThreadShape::blocked_read) return r;
        return bad("parallel composition of values inside a term");
    }
    case Kind::bang:
        return bad("!-term on a non-value");
    case Kind::store:
        return bad("store below a term constructor");
    default:
        return bad("unexpected " + kind_name(n.kind));
    }
}

}  // namespace

StuckReport classify_stuck(const Program& p) {
    StuckReport out;
    std::set<std::string> filled;
    auto ts = threads(p);
    for (const auto& t : ts) {
        const Node& n = *strip(t);
        if (n.kind == Kind::store && !n.var_target) filled.insert(n.name);
    }
    for (const auto& t : ts) {
        const Node& n = *strip(t);
        if (n.kind == Kind::store) {
            out.threads.push_back({t, ThreadShape::store, "", ""});
        } else if (is_value(t)) {
            out.threads.push_back({t, ThreadShape::value, "", ""});
        } else {
            Focus f = focus(t, filled);
            out.threads.push_back({t, f.shape, f.region, f.reason});
        }
    }
    return out;
}

std::string replay(const Trace& t) {
    Program cur = t.initial;
    for (const auto& s : t.steps) {
        std::vector<Redex> redexes;
        try {
            redexes = find_redexes(cur, t.relation, t.regions);
        } catch (const std::exception& e) {
            return "step " + std::to_string(s.index) + ": " + e.what();
        }
        auto it = std::find_if(redexes.begin(), redexes.end(), [&](const Redex& r) {
            return r.rule == s.redex.rule && r.address == s.redex.address && r.store == s.redex.store;
        });
        if (it == redexes.end())
            return "step " + std::to_string(s.index) + ": no " + rule_name(s.redex.rule) + " redex at " +
                   s.redex.address.to_string();
        Program next = step(cur, *it);
        if (!struct_equiv(next, s.after)) return "step " + std::to_string(s.index) + ": recorded program differs";
        // Later addresses refer to the recorded program, which may differ
        // from `next` by reordering parallel threads.
        cur = s.after;
    }
    return "";
}

}  // namespace lmt
