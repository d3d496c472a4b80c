// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failing criteria.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "lmt/bounds.hpp"
#include "lmt/depth.hpp"
#include "lmt/encodings.hpp"
#include "lmt/parse.hpp"
#include "lmt/reduce.hpp"
#include "lmt/refs.hpp"
#include "lmt/reorder.hpp"
#include "lmt/typecheck.hpp"
#include "support.hpp"

using namespace lmt;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream note;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) note << "failed: ";
            else note << "; ";
            note << what;
            pass = false;
        }
    }
};

struct Recorded {
    std::string name;
    SourceFile file;
    Trace trace;
};

std::vector<support::CorpusEntry> well_formed_corpus() {
    std::vector<support::CorpusEntry> out;
    for (auto& e : support::corpus())
        if (check_wf(e.file.program, e.file.regions).ok()) out.push_back(e);
    return out;
}

bool cbv_syntax(const Program& p) { return !cbv_violation(p).has_value(); }

// Traces shared by the measure and preservation criteria.
const std::vector<Recorded>& recorded_traces() {
    static std::vector<Recorded> out = [] {
        std::vector<Recorded> v;
        RunOptions o;
        o.fuel = 300;
        o.strict_shallow = false;
        for (const auto& e : well_formed_corpus()) {
            for (std::uint64_t seed = 1; seed <= 5; ++seed)
                v.push_back({e.name, e.file, run(e.file.program, Relation::full, e.file.regions, {StrategyKind::random, seed}, o).trace});
            Relation rel = cbv_syntax(e.file.program) ? Relation::cbv : Relation::cbv_ext;
            v.push_back({e.name, e.file, run(e.file.program, rel, e.file.regions, {StrategyKind::cbv_leftmost, 0}, o).trace});
            v.push_back({e.name, e.file, run(e.file.program, Relation::outer_bang, e.file.regions, {StrategyKind::shallow_first, 0}, o).trace});
        }
        return v;
    }();
    return out;
}

// -----------------------------------------------------------------------------

Outcome read_apply_write() {
    Outcome o;
    auto f = parse_source(support::read_file(std::string(LMT_CORPUS_DIR) + "/read_apply_write.lmt"));
    RegionContext R;
    R.declare("r", 0);
    std::set<std::string> deep{"01000", "01010", "100", "1000", "10000", "10001"};
    std::size_t seen = 0;
    for_each_occurrence(erase(f.program), [&](const Address& w, const Node&) {
        ++seen;
        unsigned want = deep.count(w.to_bits()) ? 1 : 0;
        unsigned got = depth_of(erase(f.program), w, R);
        o.require(got == want, "d(" + w.to_bits() + ") = " + std::to_string(got));
    });
    o.require(seen == 15, "the tree has " + std::to_string(seen) + " occurrences");
    o.require(check_wf(f.program, f.regions).ok(), "depthcheck rejects the program");
    auto t = typecheck(f.program, f.regions);
    if (t.ok()) o.require(type_equal(t.type(), ty::unit()), "the program types at " + to_string(t.type()));
    else o.require(false, "typecheck: " + explain(*t.error));
    return o;
}

Outcome counterexamples() {
    Outcome o;
    o.require(!check_wf(enc::z_term(), {}).ok(), "Z accepted");
    o.require(!check_wf(enc::chain(enc::z_term(), 3, term::bang(term::unit())), {}).ok(), "Z chain accepted");
    o.require(check_wf(enc::y_term(), {}).ok(), "Y rejected by depthcheck");
    auto y = parse_source(support::read_file(std::string(LMT_CORPUS_DIR) + "/y_chain.lmt"));
    o.require(check_wf(y.program, y.regions).ok(), "Y chain rejected by depthcheck");
    for (const char* a : {"!(1 -o 1)", "!(!1 -o 1)", "!((1 -o 1) -o 1)", "!(forall t. t -o t)"}) {
        Program typed = parse_program(std::string("(\\!x:") + a + ". $(x x)) !(\\z:1. z)");
        o.require(check_wf(typed, {}).ok(), std::string("annotated Y ill-formed at ") + a);
        o.require(!typecheck(typed, {}).ok(), std::string("Y typed at ") + a);
    }
    auto seq = parse_source("region #r : depth = 1\n(\\x. (set(#r, x) || $get(#r))) !*");
    auto w = check_wf(seq.program, seq.regions);
    o.require(!w.ok() && w.error->criterion.find("only occur at depth R(r)") != std::string::npos,
              "write-then-deeper-read not rejected by stratification");
    return o;
}

Outcome zprime_demo() {
    Outcome o;
    RunOptions ro;
    ro.strict_shallow = false;
    double c = 0;
    std::ostringstream sizes;
    for (unsigned n = 4; n <= 10; ++n) {
        auto f = enc::zprime_chain(n);
        auto d = run(f.program, Relation::full, f.regions, {StrategyKind::deep_first, 0}, ro);
        auto s = run(f.program, Relation::full, f.regions, {StrategyKind::shallow_first, 0}, ro);
        o.require(d.halted && s.halted, "n = " + std::to_string(n) + " did not halt");
        std::size_t final_size = size(d.final_program);
        if (n == 4) c = static_cast<double>(s.max_plain_size) / n;
        o.require(final_size >= (std::size_t{1} << (n - 1)), "deep-first size " + std::to_string(final_size) + " at n = " + std::to_string(n));
        o.require(static_cast<double>(s.max_plain_size) <= c * n, "shallow max " + std::to_string(s.max_plain_size) + " at n = " + std::to_string(n));
        sizes << " " << n << ":" << final_size << "/" << s.max_plain_size;
    }
    if (o.pass) o.note << "c = " << c << "; deep/shallow sizes" << sizes.str();
    return o;
}

Outcome simulation() {
    Outcome o;
    std::size_t programs = 0, traces = 0, skipped = 0;
    bool has_raw = false, has_enc = false;
    for (const auto& e : well_formed_corpus()) {
        if (!cbv_syntax(e.file.program)) {
            ++skipped;
            continue;
        }
        ++programs;
        has_raw |= e.name == "read_apply_write.lmt";
        has_enc |= e.name == "add_2_3.lmt";
        for (std::uint64_t seed = 0; seed <= 5; ++seed) {
            Strategy st{seed == 0 ? StrategyKind::cbv_leftmost : StrategyKind::random, seed};
            auto r = run(e.file.program, Relation::cbv, e.file.regions, st);
            ++traces;
            try {
                auto out = reorder_shallow_first(r.trace);
                o.require(out.trace.steps.size() == r.trace.steps.size(), e.name + " length changed");
                o.require(struct_equiv(out.trace.final_program(), r.trace.final_program()), e.name + " final differs");
                o.require(is_shallow_first(out.trace), e.name + " not shallow-first");
            } catch (const NoSwapFound& ex) {
                o.require(false, e.name + " NoSwapFound: " + ex.what());
            }
        }
    }
    o.require(programs >= 30, "only " + std::to_string(programs) + " programs");
    o.require(has_raw && has_enc, "read-apply-write or the encodings missing");
    if (o.pass)
        o.note << programs << " programs, " << traces << " traces; " << skipped
               << " programs outside call-by-value syntax have no cbv trace";
    return o;
}

Outcome bounds() {
    Outcome o;
    std::size_t runs = 0;
    auto check = [&](const std::string& name, const SourceFile& f, Strategy st, Relation rel) {
        auto rep = verify_bound(f.program, f.regions, st, rel);
        ++runs;
        o.require(rep.pass(), name + " " + strategy_name(st.kind) + "/" + std::to_string(st.seed) + ": " + rep.note);
    };
    for (const auto& e : well_formed_corpus()) {
        check(e.name, e.file, {StrategyKind::shallow_first, 0}, Relation::outer_bang);
        if (!cbv_syntax(e.file.program)) continue;
        check(e.name, e.file, {StrategyKind::cbv_leftmost, 0}, Relation::cbv);
        for (std::uint64_t seed = 1; seed <= 20; ++seed) check(e.name, e.file, {StrategyKind::random, seed}, Relation::cbv);
    }
    if (o.pass) o.note << runs << " runs within n^(2^d)";
    return o;
}

Outcome measures() {
    Outcome o;
    std::size_t steps = 0, bad = 0;
    std::map<std::string, std::size_t> by_rule;
    std::string example;
    for (const auto& r : recorded_traces()) {
        Program cur = r.trace.initial;
        for (const auto& s : r.trace.steps) {
            ++steps;
            auto m = check_unfold_monotone(cur, s.redex, r.file.regions);
            if (!m.holds()) {
                ++bad;
                ++by_rule[rule_name(s.redex.rule)];
                if (example.empty())
                    example = r.name + " step " + std::to_string(s.index) + " (" + rule_name(s.redex.rule) + ") " +
                              std::to_string(m.before) + " -> " + std::to_string(m.after);
            }
            cur = s.after;
        }
    }
    if (bad) {
        std::ostringstream os;
        os << "unfolding grows on " << bad << "/" << steps << " steps (";
        bool first = true;
        for (const auto& [k, v] : by_rule) {
            os << (first ? "" : ", ") << k << " " << v;
            first = false;
        }
        os << "), e.g. " << example;
        o.require(false, os.str());
    }
    std::size_t programs = 0;
    for (const auto& e : well_formed_corpus()) {
        ++programs;
        auto q = check_quadratic(e.file.program, e.file.regions);
        o.require(q.holds(), e.name + ": " + q.failure);
        Program p = e.file.program;
        unsigned d = depth(p, e.file.regions);
        for (unsigned i = 0; i <= d; ++i) {
            auto s = check_squaring(p, i, e.file.regions);
            o.require(s.holds(), e.name + " squaring at depth " + std::to_string(i) + ": size " +
                                     std::to_string(s.final_size) + ", length " + std::to_string(s.length) +
                                     " for |P| = " + std::to_string(s.size));
            p = s.result;
        }
    }
    if (o.pass) o.note << steps << " steps, " << programs << " programs";
    else o.note << "; quadratic and squaring checks ran on " << programs << " programs";
    return o;
}

bool only_stores(const Program& p) {
    if (p->kind == Kind::par) return only_stores(p->first) && only_stores(p->second);
    return p->kind == Kind::store;
}

Outcome preservation() {
    Outcome o;
    std::size_t steps = 0, typed_steps = 0, type_changes = 0;
    std::string example;
    for (const auto& r : recorded_traces()) {
        const auto& R = r.file.regions;
        auto t0 = typecheck(r.trace.initial, R);
        Type alpha = t0.ok() ? t0.type() : nullptr;
        unsigned d = depth(r.trace.initial, R);
        for (const auto& s : r.trace.steps) {
            ++steps;
            o.require(check_wf(s.after, R).ok(), r.name + " step " + std::to_string(s.index) + " ill-formed");
            unsigned d2 = depth(s.after, R);
            o.require(d2 <= d, r.name + " depth grew");
            d = d2;
            if (!alpha) continue;
            ++typed_steps;
            auto t = typecheck(s.after, R);
            if (!t.ok() || !type_equal(t.type(), alpha)) {
                ++type_changes;
                if (example.empty())
                    example = r.name + " step " + std::to_string(s.index) + " (" + rule_name(s.redex.rule) + "): " +
                              to_string(alpha) + " -> " + (t.ok() ? to_string(t.type()) : "untypable") +
                              (only_stores(s.after) ? ", only stores left" : "");
                if (!t.ok()) break;
                alpha = t.type();
            }
        }
    }
    if (type_changes)
        o.require(false, "type changed on " + std::to_string(type_changes) + "/" + std::to_string(typed_steps) +
                             " typed steps, e.g. " + example);
    if (o.pass) o.note << steps << " steps, " << typed_steps << " typed";
    return o;
}

Outcome progress() {
    Outcome o;
    std::size_t programs = 0;
    for (const auto& e : support::corpus()) {
        if (!cbv_syntax(e.file.program) || !typecheck(e.file.program, e.file.regions).ok()) continue;
        ++programs;
        for (std::uint64_t seed = 0; seed <= 5; ++seed) {
            Strategy st{seed == 0 ? StrategyKind::cbv_leftmost : StrategyKind::random, seed};
            auto r = run(e.file.program, Relation::cbv, e.file.regions, st);
            o.require(r.halted, e.name + " ran out of fuel");
            auto rep = classify_stuck(r.final_program);
            o.require(rep.ok(), e.name + " has a thread that is neither a value nor a blocked read");
        }
    }
    if (o.pass) o.note << programs << " typed programs";
    return o;
}

std::vector<unsigned> cells(const refs::NuRun& r) {
    std::vector<unsigned> out;
    for (const char* x : {"x", "y", "z"}) {
        auto v = refs::lookup(r.final_state.program, x);
        auto d = v ? enc::decode_nat(*v) : std::nullopt;
        out.push_back(d ? *d : 0);
    }
    return out;
}

std::string show(const std::vector<unsigned>& v) {
    return "(" + std::to_string(v[0]) + "," + std::to_string(v[1]) + "," + std::to_string(v[2]) + ")";
}

Outcome end_to_end() {
    Outcome o;
    auto run = enc::build_run(0, 1, 2);
    auto r = refs::run({run.program, run.locations}, Relation::cbv_ext, {});
    o.require(r.halted && cells(r) == std::vector<unsigned>{2, 3, 4}, "run gives " + show(cells(r)));
    auto thr = enc::build_run_threads(0, 1, 2);
    std::vector<std::string> wrong;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto t = refs::run({thr.program, thr.locations}, Relation::cbv_ext, {StrategyKind::random, seed});
        if (!t.halted || cells(t) != std::vector<unsigned>{6, 7, 8})
            wrong.push_back("seed " + std::to_string(seed) + " " + show(cells(t)));
    }
    if (!wrong.empty()) {
        std::string s = std::to_string(wrong.size()) + "/20 seeds lose updates:";
        for (const auto& w : wrong) s += " " + w;
        o.require(false, s);
    }
    return o;
}

Outcome reference() {
    Outcome o;
    std::size_t programs = 0, steps = 0;
    for (const auto& e : support::corpus(".lmtnu")) {
        if (e.name == "run.lmtnu" || e.name == "run_threads.lmtnu") continue;
        ++programs;
        refs::NuState s{e.file.program, e.file.locations};
        auto typed = typecheck(e.file.program, e.file.regions, {}, 0, e.file.locations);
        auto tr = typecheck(refs::translate(s), e.file.regions);
        o.require(typed.ok() && tr.ok() && type_equal(typed.type(), tr.type()), e.name + " typing not preserved");
        auto r = refs::run(s, Relation::cbv, {});
        auto rep = refs::check_simulation(r, e.file.regions);
        o.require(rep.ok, e.name + ": " + rep.failure);
        if (!rep.ok) continue;
        steps += r.steps.size();
        for (std::size_t i = 0; i < r.steps.size(); ++i) {
            bool set = r.steps[i].redex.rule == Rule::set;
            o.require(set ? rep.region_steps[i] == 1 : rep.region_steps[i] >= 1, e.name + " step count");
        }
    }
    o.require(programs >= 10, "only " + std::to_string(programs) + " reference programs");
    if (o.pass) o.note << programs << " programs, " << steps << " steps";
    return o;
}

}  // namespace

int main() {
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"read-apply-write depths, depthcheck and typecheck", read_apply_write},
        {"Z rejected, Y well-formed but untypable, write-then-deeper-read rejected", counterexamples},
        {"exponential deep-first vs linear shallow-first Z' chain", zprime_demo},
        {"cbv traces reorder into shallow-first traces", simulation},
        {"polynomial step and size bounds", bounds},
        {"unfolding and squaring measures", measures},
        {"well-formedness, depth and type preserved by reduction", preservation},
        {"progress on typed call-by-value normal forms", progress},
        {"run and run_threads stores", end_to_end},
        {"reference programs simulated by their translation", reference},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& ex) {
            o.require(false, std::string("exception: ") + ex.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += !o.pass;
        std::string note = o.note.str();
        for (char& ch : note)
            if (ch == '\n') ch = ' ';
        if (note.size() > 600) note = note.substr(0, 600) + "...";
        std::printf("CRITERION %zu: %s (%.2fs) %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", secs,
                    criteria[i].first.c_str(), note.c_str());
        std::fflush(stdout);
    }
    return failures;
}
