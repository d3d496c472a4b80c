#include "lmt/reorder.hpp"

#include <algorithm>
#include <optional>

namespace lmt {

namespace {

struct Candidate {
    Redex first;
    Redex second;
    Program middle;

    auto key() const { return std::tie(first.address, first.store, second.address, second.store); }
};

std::optional<Candidate> search(const Program& p, unsigned i, unsigned j, const std::string& target,
                                const RegionContext& R, Relation rel, const Rule* rule1, const Rule* rule2) {
    std::optional<Candidate> best;
    for (const Redex& r1 : find_redexes(p, rel, R)) {
        if (r1.depth != j || (rule1 && r1.rule != *rule1)) continue;
        Program mid = step(p, r1);
        for (const Redex& r2 : find_redexes(mid, rel, R)) {
            if (r2.depth != i || (rule2 && r2.rule != *rule2)) continue;
            if (canonical_form(step(mid, r2)) != target) continue;
            Candidate c{r1, r2, mid};
            if (!best || c.key() < best->key()) best = c;
        }
    }
    return best;
}

}  // namespace

std::pair<TraceStep, TraceStep> swap_adjacent(const Program& p, const TraceStep& s1, const TraceStep& s2,
                                              const RegionContext& R, Relation rel) {
    unsigned i = s1.redex.depth, j = s2.redex.depth;
    if (i <= j) throw NoSwapFound("swap requested for steps of depths " + std::to_string(i) + " and " + std::to_string(j));
    std::string target = canonical_form(s2.after);
    // The moved steps keep their rules in every case of the lemma; the
    // unrestricted search is a fallback.
    auto found = search(p, i, j, target, R, rel, &s2.redex.rule, &s1.redex.rule);
    if (!found) found = search(p, i, j, target, R, rel, nullptr, nullptr);
    if (!found)
        throw NoSwapFound("no swap for " + rule_name(s1.redex.rule) + "@" + s1.redex.address.to_string() + " (depth " +
                          std::to_string(i) + ") followed by " + rule_name(s2.redex.rule) + "@" +
                          s2.redex.address.to_string() + " (depth " + std::to_string(j) + ")");
    TraceStep a{s1.index, found->first, found->middle, s1.seed};
    TraceStep b{s2.index, found->second, s2.after, s2.seed};
    return {a, b};
}

ReorderResult reorder_shallow_first(const Trace& t) {
    ReorderResult out;
    out.trace = t;
    out.trace.relation = Relation::outer_bang;
    out.trace.strategy.kind = StrategyKind::shallow_first;
    auto& steps = out.trace.steps;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t k = 0; k + 1 < steps.size(); ++k) {
            if (steps[k].redex.depth <= steps[k + 1].redex.depth) continue;
            const Program& before = k == 0 ? t.initial : steps[k - 1].after;
            auto [a, b] = swap_adjacent(before, steps[k], steps[k + 1], t.regions);
            steps[k] = a;
            steps[k + 1] = b;
            changed = true;
            ++out.swaps;
        }
        ++out.traversals;
    }
    for (std::size_t k = 0; k < steps.size(); ++k) steps[k].index = k + 1;
    return out;
}

bool is_shallow_first(const std::vector<unsigned>& profile) { return std::is_sorted(profile.begin(), profile.end()); }

bool is_shallow_first(const Trace& t) { return is_shallow_first(t.depth_profile()); }

}  // namespace lmt
