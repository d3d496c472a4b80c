#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lmt/depth.hpp"
#include "lmt/encodings.hpp"
#include "lmt/parse.hpp"
#include "lmt/reduce.hpp"
#include "support.hpp"

using namespace lmt;

namespace {

WfResult wf(const std::string& src) {
    auto f = parse_source(src);
    return check_wf(f.program, f.regions, {}, 0, f.locations);
}

// (rule, δ, usage of x or "-") in pre-order.
void flatten(const DepthDerivation& d, std::vector<std::string>& out) {
    std::string u = d.gamma.count("x") ? usage_name(d.gamma.at("x")) : "-";
    out.push_back(d.rule + "/" + std::to_string(d.delta) + "/" + u);
    for (const auto& p : d.premises) flatten(p, out);
}

}  // namespace

TEST_CASE("the read-apply-write program has the two expected derivation trees") {
    auto r = wf(support::kReadApplyWrite);
    REQUIRE(r.ok());
    std::vector<std::string> got;
    flatten(*r.derivation, got);
    // Left tree, then right tree; each entry is rule/depth/usage of x.
    std::vector<std::string> want{
        "par/0/-",
        "let!/0/-", "get/0/-", "region/0/-",
        "set/0/!", "region/0/!", "app/0/!", "bang/0/!", "var/1/λ", "para/0/!", "var/1/λ",
        "store/0/-", "bang/0/-", "lam/1/-", "app/1/λ", "var/1/λ", "unit/1/λ",
    };
    CHECK(got == want);
    CHECK(r.derivation->node_count() == want.size());
}

TEST_CASE("Z is rejected, Y is accepted") {
    auto z = check_wf(enc::z_term(), {});
    REQUIRE_FALSE(z.ok());
    CHECK(z.error->address.to_bits() == "01");
    CHECK(explain(*z.error).find("at most one occurrence of free variable") != std::string::npos);
    CHECK(check_wf(enc::y_term(), {}).ok());
}

TEST_CASE("binding zero occurrences is rejected") {
    auto r = wf("(\\z. *) *");
    REQUIRE_FALSE(r.ok());
    CHECK(explain(*r.error).find("binder binds zero occurrences") != std::string::npos);
    auto l = wf("let !x = !* in *");
    REQUIRE_FALSE(l.ok());
    CHECK(explain(*l.error).find("binds zero occurrences") != std::string::npos);
}

TEST_CASE("well-formed programs have no error") {
    auto r = wf("\\x. x");
    CHECK(r.ok());
    CHECK_FALSE(r.error.has_value());
}

TEST_CASE("linearity and modal discipline") {
    CHECK_FALSE(wf("\\x. x x").ok());                       // λ binds exactly one
    CHECK_FALSE(wf("\\x. !x").ok());                        // λ-variable under !
    CHECK_FALSE(wf("let $y = $* in $(y y)").ok());          // let $ binds exactly one
    CHECK(wf("let !y = !* in $(y y)").ok());                // ! variables may be duplicated under §
    CHECK_FALSE(wf("let !y = !* in y").ok());               // ... but only one level below
    CHECK_FALSE(wf("let !y = !* in $$y").ok());
    CHECK(wf("let $y = $* in $y").ok());
    CHECK_FALSE(wf("let $y = $* in !y").ok());               // § variables are not promotable
    CHECK_FALSE(wf("\\x. let !y = x in !(y y)").ok());       // fo_all(M) <= 1 under !
}

TEST_CASE("stratification of regions") {
    CHECK(wf("region #r : depth = 0\nget(#r)").ok());
    CHECK(wf("region #r : depth = 1\n$get(#r)").ok());
    auto bad = wf("region #r : depth = 1\nget(#r)");
    REQUIRE_FALSE(bad.ok());
    CHECK(explain(*bad.error).find("depth") != std::string::npos);
    CHECK(wf("region #r : depth = 2\n#r <= $$*").ok());
    CHECK_FALSE(wf("region #r : depth = 0\n$(#r <= *)").ok());  // stores only at depth 0
}

TEST_CASE("a write then a deeper read is rejected by stratification") {
    // write at depth 0 then read at depth 1 through the same region
    auto r = wf("region #r : depth = 1\n(\\x. (set(#r, x) || $get(#r))) !*");
    REQUIRE_FALSE(r.ok());
    CHECK(explain(*r.error).find("set on #r occurs at depth 0 but R(r) = 1") != std::string::npos);
}

TEST_CASE("the garbage region macro") {
    auto m = parse_program("set(#r, *)");
    auto n = parse_program("get(#r)");
    RegionContext R;
    R.declare("r", 0);
    R.declare("gr", 0);
    Program s = enc::seq(m, n);
    CHECK(check_wf(s, R).ok());
    auto run_ = run(s, Relation::cbv, R, {});
    CHECK(run_.halted);
}

TEST_CASE("weakening: extra context entries do not matter") {
    for (const auto& e : support::corpus()) {
        auto base = check_wf(e.file.program, e.file.regions, {}, 0, e.file.locations);
        VarContext G{{"fresh_a", Usage::lam}, {"fresh_b", Usage::bang}, {"fresh_c", Usage::para}};
        auto weak = check_wf(e.file.program, e.file.regions, G, 0, e.file.locations);
        CHECK(base.ok() == weak.ok());
    }
}

TEST_CASE("substitution lemma instances") {
    // λ: M[N/x] with N well-formed at the same depth
    VarContext G{{"x", Usage::lam}};
    Program m = parse_program("x *");
    Program n = parse_program("\\y. y");
    REQUIRE(check_wf(m, {}, G).ok());
    CHECK(check_wf(substitute(m, "x", n), {}).ok());
    // !: M[N/x] where x has ! usage and N is judged one level deeper
    VarContext Gb{{"x", Usage::bang}};
    Program mb = parse_program("$(x x)");
    REQUIRE(check_wf(mb, {}, Gb).ok());
    REQUIRE(check_wf(n, {}, {}, 1).ok());
    CHECK(check_wf(substitute(mb, "x", n), {}).ok());
    // §: x has § usage, N is judged one level deeper
    VarContext Gp{{"x", Usage::para}};
    Program mp = parse_program("$(x *)");
    REQUIRE(check_wf(mp, {}, Gp).ok());
    CHECK(check_wf(substitute(mp, "x", n), {}).ok());
}

TEST_CASE("every corpus program is well-formed") {
    for (const char* ext : {".lmt", ".lmtnu"}) {
        for (const auto& e : support::corpus(ext)) {
            INFO(e.name);
            auto r = check_wf(e.file.program, e.file.regions, {}, 0, e.file.locations);
            CHECK(r.ok());
        }
    }
}

TEST_CASE("derivation depth labels agree with occurrence depths") {
    // Every node of the derivation is judged at the depth of its occurrence.
    for (const auto& e : support::corpus()) {
        auto r = check_wf(e.file.program, e.file.regions);
        REQUIRE(r.ok());
        std::function<void(const DepthDerivation&, const std::string&)> go = [&](const DepthDerivation& d,
                                                                                const std::string& w) {
            if (d.rule == "region" || (d.rule == "var" && d.term->kind == Kind::var && !w.empty() &&
                                       support::unwrap(at(e.file.program, Address::parse(w)))->kind != Kind::var))
                return;
            CHECK(d.delta == support::oracle_depth(e.file.program, w, e.file.regions));
            std::size_t skip = (d.rule == "get" || d.rule == "set") ? 1 : 0;
            for (std::size_t i = skip; i < d.premises.size(); ++i) go(d.premises[i], w + char('0' + (i - skip)));
        };
        go(*r.derivation, "");
    }
}
