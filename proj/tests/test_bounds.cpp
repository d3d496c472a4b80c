#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lmt/bounds.hpp"
#include "lmt/depth.hpp"
#include "lmt/encodings.hpp"
#include "lmt/parse.hpp"
#include "support.hpp"

using namespace lmt;

namespace {

const char* kDup = "let !x = !(\\z. z) in (let !y = !x in $(y y) || let !y = !x in $(y y))";

std::size_t wsize(const Program& p) { return size(p, SizeConvention::weighted); }

// Independent n^(2^d) with long double, saturated like the library.
std::uint64_t oracle_bound(std::uint64_t n, unsigned d) {
    long double v = static_cast<long double>(n);
    for (unsigned i = 0; i < d; ++i) v = v * v;
    if (v >= 1.8e19L) return UINT64_MAX;
    return static_cast<std::uint64_t>(v);
}

}  // namespace

TEST_CASE("unfolding duplicates M four times at depth 0") {
    Program p = parse_program(kDup);
    Program u = unfold(p, 0, {});
    REQUIRE(u->kind == Kind::let_bang);
    REQUIRE(u->first->kind == Kind::bag);
    CHECK(u->first->copies == 4);
    std::vector<std::size_t> inner;
    for_each_occurrence(u, [&](const Address& w, const Node& n) {
        if (n.kind == Kind::bag && w != Address::parse("0")) inner.push_back(n.copies);
    });
    CHECK(inner == std::vector<std::size_t>{2, 2});
}

TEST_CASE("unfolding leaves units and stops at modalities") {
    CHECK(print(unfold(parse_program("*"), 3, {})) == "*");
    Program b = parse_program("!((\\x. x) *)");
    CHECK(alpha_equiv(unfold(b, 0, {}), b));
}

TEST_CASE("unfolding at depth 0 counts free occurrences of the body") {
    // k = fo(x, N) copies of the bound !-term
    Program p = parse_program("let !x = !* in $(x x x)");
    Program u = unfold(p, 0, {});
    REQUIRE(u->kind == Kind::let_bang);
    REQUIRE(u->first->kind == Kind::bag);
    CHECK(u->first->copies == 3);
}

TEST_CASE("para and set steps never grow the unfolding") {
    for (const auto& e : support::corpus()) {
        if (!check_wf(e.file.program, e.file.regions).ok()) continue;
        INFO(e.name);
        auto r = run(e.file.program, Relation::full, e.file.regions, {StrategyKind::random, 3}, {200, false});
        Program cur = e.file.program;
        for (const auto& s : r.trace.steps) {
            auto m = check_unfold_monotone(cur, s.redex, e.file.regions);
            if (s.redex.rule == Rule::para) CHECK(m.holds());
            if (s.redex.rule == Rule::set) CHECK(m.strict());
            cur = s.after;
        }
    }
}

// A step whose contractum is a !-term sitting under an enclosing let-!
// turns that let into a bag of k copies. The sizes below are computed by
// hand: c is the weighted size of the !-term that ends up copied.
TEST_CASE("steps that complete an enclosing let-! grow the unfolding") {
    SUBCASE("get feeding a binder used twice") {
        auto f = parse_source(support::kReadApplyWrite);
        auto rs = find_redexes(f.program, Relation::full, f.regions);
        REQUIRE(rs.size() == 1);
        REQUIRE(rs[0].rule == Rule::get);
        auto m = check_unfold_monotone(f.program, rs[0], f.regions);
        std::size_t c = wsize(parse_program("!(\\x. x *)"));
        // before: get (1) plus the content once; after: the content twice
        CHECK(m.after - m.before == 2 * c - (1 + c));
        CHECK_FALSE(m.holds());
    }
    SUBCASE("beta substituting a !-term for a let-! argument") {
        Program p = parse_program("(\\y. let !x = y in $(x x x)) !(\\a. a)");
        REQUIRE(check_wf(p, {}).ok());
        auto rs = find_redexes(p, Relation::full, {});
        REQUIRE(rs[0].rule == Rule::beta);
        auto m = check_unfold_monotone(p, rs[0], {});
        std::size_t c = wsize(parse_program("!(\\a. a)"));
        // before: application, λ, y and the argument once; after: three copies
        CHECK(m.after - m.before == 3 * c - (3 + c));
        CHECK_FALSE(m.holds());
    }
    SUBCASE("a ! step inside a let-! argument") {
        Program p = parse_program("let !w = (let !y = !(\\a. a) in !y) in $(w w w)");
        REQUIRE(check_wf(p, {}).ok());
        auto rs = find_redexes(p, Relation::full, {});
        REQUIRE(rs[0].rule == Rule::bang);
        REQUIRE(rs[0].address == Address::parse("0"));
        auto m = check_unfold_monotone(p, rs[0], {});
        std::size_t c = wsize(parse_program("!(\\a. a)"));
        // before: inner let (1), one copy, !y (2); after: three copies
        CHECK(m.after - m.before == 3 * c - (1 + c + 2));
        CHECK_FALSE(m.holds());
    }
}

TEST_CASE("the duplicating ! step decreases the unfolded size strictly") {
    Program p = parse_program(kDup);
    auto rs = find_redexes(p, Relation::full, {});
    REQUIRE_FALSE(rs.empty());
    REQUIRE(rs[0].rule == Rule::bang);
    REQUIRE(rs[0].depth == 0);
    CHECK(check_unfold_monotone(p, rs[0], {}).strict());
}

TEST_CASE("quadratic bounds") {
    auto f = parse_source(support::kReadApplyWrite);
    auto q = check_quadratic(f.program, f.regions);
    CHECK(q.holds());
    CHECK(check_quadratic(parse_program(kDup), {}).holds());
    for (const auto& e : support::corpus()) {
        if (!check_wf(e.file.program, e.file.regions).ok()) continue;
        INFO(e.name);
        CHECK(check_quadratic(e.file.program, e.file.regions).holds());
    }
}

TEST_CASE("the unit program is a counterexample to the quadratic size bound") {
    // |⋆| = 1, so |P|·(|P|−1) = 0 < 1 = |⟨⋆⟩₀|. The occurrence bound holds.
    auto q = check_quadratic(parse_program("*"), {});
    CHECK_FALSE(q.holds());
    CHECK(q.failure.find("size") != std::string::npos);
    auto s = check_squaring(parse_program("*"), 0, {});
    CHECK(s.length == 0);
    CHECK(s.length_ok());
    CHECK_FALSE(s.size_ok());
}

TEST_CASE("squaring") {
    auto f = parse_source(support::kReadApplyWrite);
    CHECK(check_squaring(f.program, 0, f.regions).holds());
    auto none = check_squaring(parse_program("\\x. x"), 0, {});
    CHECK(none.length == 0);
    CHECK(none.holds());
    for (unsigned n = 1; n <= 5; ++n) {
        Program y = enc::chain(enc::y_term(), n, term::bang(term::unit()));
        REQUIRE(check_wf(y, {}).ok());
        auto s = check_squaring(y, 0, {});
        INFO(n);
        CHECK(s.holds());
    }
}

TEST_CASE("the bound function") {
    CHECK(poly_bound(3, 0) == 3);
    CHECK(poly_bound(3, 1) == 9);
    CHECK(poly_bound(3, 2) == 81);
    CHECK(poly_bound(2, 6) == UINT64_MAX);
    for (std::uint64_t n : {1u, 2u, 7u, 20u, 300u})
        for (unsigned d = 0; d <= 6; ++d) CHECK(poly_bound(n, d) == oracle_bound(n, d));
}

TEST_CASE("bound reports") {
    auto f = parse_source(support::kReadApplyWrite);
    auto rep = verify_bound(f.program, f.regions, {}, Relation::cbv);
    CHECK(rep.pass());
    CHECK(rep.depth == 1);
    CHECK(rep.bound == rep.weighted_size * rep.weighted_size);
    CHECK(rep.steps <= rep.bound);
    CHECK(rep.to_text().find("steps: ") != std::string::npos);

    auto unit = verify_bound(parse_program("*"), {}, {}, Relation::cbv);
    CHECK(unit.steps == 0);
    CHECK(unit.pass());

    Program add = parse_program("(" + print(enc::add()) + ") (" + print(enc::nat(2)) + ") (" + print(enc::nat(3)) + ")");
    CHECK(verify_bound(add, {}, {}, Relation::cbv).pass());
}

TEST_CASE("ill-formed programs are never certified") {
    Program z = enc::chain(enc::z_term(), 3, term::bang(term::unit()));
    auto rep = verify_bound(z, {}, {StrategyKind::shallow_first, 0}, Relation::outer_bang);
    CHECK_FALSE(rep.well_formed);
    CHECK_FALSE(rep.pass());
    CHECK_THROWS_AS(certify_bound(z, {}, {}, Relation::outer_bang), BoundViolation);
}
