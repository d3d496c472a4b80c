#include "lmt/bounds.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "lmt/depth.hpp"

namespace lmt {

namespace {

Term unfold_rec(const Term& t, unsigned i, const RegionContext& R) {
    const Node& n = *t;
    switch (n.kind) {
    case Kind::var:
    case Kind::region:
    case Kind::unit:
    case Kind::get:
        return t;
    case Kind::bang:
    case Kind::para:
        if (i == 0) return t;
        return with_children(t, unfold_rec(n.first, i - 1, R), nullptr);
    case Kind::let_bang:
        if (i == 0 && n.first->kind == Kind::bang) {
            Term body = unfold_rec(n.second, 0, R);
            std::size_t k = count_occ(n.name, body);
            return term::let_bang(n.name, term::bag(k, n.first), body);
        }
        return with_children(t, unfold_rec(n.first, i, R), unfold_rec(n.second, i, R));
    case Kind::store: {
        unsigned d = n.var_target ? 0 : R.depth(n.name);
        if (i < d) return t;
        return with_children(t, unfold_rec(n.first, i - d, R), nullptr);
    }
    case Kind::bag:
        throw std::invalid_argument("cannot unfold an unfolded program");
    default:
        return with_children(t, n.first ? unfold_rec(n.first, i, R) : nullptr,
                             n.second ? unfold_rec(n.second, i, R) : nullptr);
    }
}

}  // namespace

Program unfold(const Program& p, unsigned i, const RegionContext& R) { return unfold_rec(erase(p), i, R); }

MonotoneCheck check_unfold_monotone(const Program& p, const Redex& r, const RegionContext& R) {
    Program q = step(p, r);
    MonotoneCheck out;
    out.before = size(unfold(p, r.depth, R), SizeConvention::weighted);
    out.after = size(unfold(q, r.depth, R), SizeConvention::weighted);
    return out;
}

QuadraticCheck check_quadratic(const Program& p, const RegionContext& R) {
    QuadraticCheck out;
    std::size_t n = size(p, SizeConvention::weighted);
    out.size = n;
    unsigned d = depth(p, R);
    for (unsigned i = 0; i <= d; ++i) {
        Program u = unfold(p, i, R);
        std::size_t fo = count_all_free(u);
        std::size_t s = size(u, SizeConvention::weighted);
        if (fo > n) {
            out.failing_depth = i;
            out.failure = "fo_all of the unfolding at depth " + std::to_string(i) + " is " + std::to_string(fo) +
                          " > |P| = " + std::to_string(n);
            return out;
        }
        if (s > n * (n == 0 ? 0 : n - 1)) {
            out.failing_depth = i;
            out.failure = "unfolding at depth " + std::to_string(i) + " has size " + std::to_string(s) +
                          " > |P|(|P|-1) = " + std::to_string(n * (n == 0 ? 0 : n - 1));
            return out;
        }
    }
    return out;
}

SquaringCheck check_squaring(const Program& p, unsigned i, const RegionContext& R, std::size_t fuel) {
    SquaringCheck out;
    out.size = size(p, SizeConvention::weighted);
    Program cur = p;
    while (true) {
        auto redexes = find_redexes(cur, Relation::full, R);
        auto it = std::find_if(redexes.begin(), redexes.end(), [&](const Redex& r) { return r.depth == i; });
        if (it == redexes.end()) break;
        if (out.length >= fuel) {
            out.exhausted = false;
            break;
        }
        cur = step(cur, *it);
        ++out.length;
    }
    out.result = cur;
    out.final_size = size(cur, SizeConvention::weighted);
    return out;
}

std::uint64_t poly_bound(std::uint64_t n, unsigned d) {
    constexpr auto top = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t b = n;
    for (unsigned k = 0; k < d; ++k) {
        if (b != 0 && b > top / b) return top;
        b *= b;
    }
    return b;
}

std::string BoundReport::to_text() const {
    std::ostringstream os;
    os << "initial_size: " << weighted_size << "\n"
       << "initial_plain_size: " << plain_size << "\n"
       << "depth: " << depth << "\n"
       << "bound: " << bound << "\n"
       << "steps: " << steps << "\n"
       << "max_size: " << max_weighted_size << "\n"
       << "max_plain_size: " << max_plain_size << "\n"
       << "final_size: " << final_weighted_size << "\n"
       << "well_formed: " << (well_formed ? "true" : "false") << "\n"
       << "halted: " << (halted ? "true" : "false") << "\n"
       << "steps_ok: " << (steps_ok ? "true" : "false") << "\n"
       << "size_ok: " << (size_ok ? "true" : "false") << "\n"
       << "pass: " << (pass() ? "true" : "false") << "\n";
    if (!note.empty()) os << "note: " << note << "\n";
    return os.str();
}

BoundReport verify_bound(const Program& p, const RegionContext& R, Strategy strat, Relation rel, std::size_t fuel_cap) {
    BoundReport rep;
    rep.plain_size = size(p, SizeConvention::plain);
    rep.weighted_size = size(p, SizeConvention::weighted);
    rep.depth = depth(p, R);
    rep.bound = poly_bound(rep.weighted_size, rep.depth);
    auto wf = check_wf(p, R);
    rep.well_formed = wf.ok();
    if (!rep.well_formed) {
        rep.note = "not well-formed, no bound is claimed: " + wf.error->message;
        return rep;
    }
    RunOptions opts;
    opts.fuel = rep.bound < fuel_cap ? static_cast<std::size_t>(rep.bound) + 1 : fuel_cap;
    RunResult res = run(p, rel, R, strat, opts);
    rep.steps = res.trace.steps.size();
    rep.halted = res.halted;
    rep.max_weighted_size = res.max_weighted_size;
    rep.max_plain_size = res.max_plain_size;
    rep.final_weighted_size = size(res.final_program, SizeConvention::weighted);
    rep.steps_ok = rep.steps <= rep.bound;
    rep.size_ok = rep.max_weighted_size <= rep.bound;
    if (!rep.halted) rep.note = "fuel exhausted after " + std::to_string(rep.steps) + " steps";
    return rep;
}

BoundReport certify_bound(const Program& p, const RegionContext& R, Strategy strat, Relation rel) {
    BoundReport rep = verify_bound(p, R, strat, rel);
    if (!rep.pass()) throw BoundViolation("bound not certified:\n" + rep.to_text());
    return rep;
}

}  // namespace lmt
