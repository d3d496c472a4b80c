#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lmt/parse.hpp"
#include "support.hpp"

using namespace lmt;

TEST_CASE("the read-apply-write program has the expected tree") {
    auto f = parse_source(support::kReadApplyWrite);
    const Term& p = f.program;
    REQUIRE(p->kind == Kind::par);
    CHECK(p->first->kind == Kind::let_bang);
    CHECK(p->first->name == "x");
    CHECK(p->first->first->kind == Kind::get);
    CHECK(p->first->second->kind == Kind::set);
    CHECK(p->second->kind == Kind::store);
    CHECK(p->second->name == "r");
    CHECK(p->second->first->kind == Kind::bang);
    CHECK(f.regions.depth("r") == 0);
}

TEST_CASE("unit and the Z combinator") {
    CHECK(parse_program("*")->kind == Kind::unit);
    CHECK(print(term::unit()) == "*");
    Term z = parse_program("\\x. let !x = x in !(x x)");
    REQUIRE(z->kind == Kind::lam);
    REQUIRE(z->first->kind == Kind::let_bang);
    CHECK(z->first->second->kind == Kind::bang);
    CHECK(z->first->second->first->kind == Kind::app);
    // the abbreviation desugars to the same term
    CHECK(alpha_equiv(parse_program("\\!x. !(x x)"), z));
}

TEST_CASE("precedence and associativity") {
    Term t = parse_program("a b c || d || e");
    REQUIRE(t->kind == Kind::par);
    CHECK(t->first->kind == Kind::app);
    CHECK(t->first->first->kind == Kind::app);  // left-assoc application
    CHECK(t->second->kind == Kind::par);        // right-assoc parallel
    Term l = parse_program("\\x. x || *");
    CHECK(l->kind == Kind::par);  // λ bodies stop at ||
    Term b = parse_program("!x y");
    CHECK(b->kind == Kind::app);  // prefix binds tighter than application
}

TEST_CASE("unicode synonyms") {
    Term a = parse_program("λx. let !y = x in §(y ⋆) ∥ #r ⇐ ⋆");
    Term b = parse_program("\\x. let !y = x in $(y *) || #r <= *");
    CHECK(alpha_equiv(a, b));
}

TEST_CASE("types") {
    CHECK(to_string(parse_type("1 -o 1")) == "1 -o 1");
    CHECK(type_equal(parse_type("forall t. !(t -o t) -o $(t -o t)"), parse_type("∀s. !(s ⊸ s) ⊸ §(s ⊸ s)")));
    Type e = parse_type("1 -o{r;s} B");
    REQUIRE(e->kind == TypeKind::arrow);
    CHECK(e->eff_in == Effect{"r"});
    CHECK(e->eff_out == Effect{"s"});
    CHECK(type_equal(parse_type(to_string(e)), e));
    CHECK(parse_type("Reg #r !1")->kind == TypeKind::region);
}

TEST_CASE("header declarations") {
    auto f = parse_source("type Id u = u -o u\nregion #r : depth = 2, type = Id 1\nloc x : Reg #r Id 1\nset(x, *)");
    CHECK(f.regions.depth("r") == 2);
    CHECK(type_equal(f.regions.content("r"), parse_type("1 -o 1")));
    CHECK(f.locations.count("x"));
    CHECK(f.typed());
}

TEST_CASE("errors carry positions") {
    try {
        parse_source("region #r : depth = 0\n\\x. (x");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(e.column > 0);
    }
    CHECK_THROWS_AS(parse_source("get(#r)"), ParseError);  // undeclared region
    CHECK_THROWS_AS(parse_program("let !x = * in"), ParseError);
    CHECK_THROWS_AS(parse_type("1 -o"), ParseError);
}

TEST_CASE("round trip over the corpus") {
    for (const char* ext : {".lmt", ".lmtnu"}) {
        for (const auto& e : support::corpus(ext)) {
            INFO(e.name);
            Program again = parse_program(print(e.file.program));
            CHECK(struct_equiv(again, e.file.program));
            CHECK(alpha_equiv(again, e.file.program));
            auto g = parse_source(print_source(e.file));
            CHECK(alpha_equiv(g.program, e.file.program));
            CHECK(g.regions.to_string() == e.file.regions.to_string());
            CHECK(g.locations.size() == e.file.locations.size());
        }
    }
}

TEST_CASE("round trip of annotated terms") {
    for (const char* s : {"gen t. \\x:t. x", "(gen t. \\x:t. x) [1 -o 1]", "nu x : Reg #r !1. get(x)",
                          "\\$x:$1. x", "let $y = $* in $y", "set(x, !*) || x <= !*"}) {
        INFO(s);
        Program p = parse_program(s);
        CHECK(alpha_equiv(parse_program(print(p)), p));
    }
}
