#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lmt/parse.hpp"
#include "lmt/syntax.hpp"

namespace lmt::enc {

/// Type abbreviations `Nat`, `BNat` and `List u`.
const std::map<std::string, TypeAlias>& aliases();

Type nat_type();
Type bnat_type();
Type list_type(const Type& elem);

/// λ!f.§(λx.f(…(f x))) with n applications (annotated).
Program nat(unsigned n);
/// λ!x₀.λ!x₁.§(λz.x_{i₀}(…(x_{iₙ} z))).
Program word(const std::string& bits);
/// λ!f.§(λx.f u₁ (… (f uₙ x))) over elements of type `elem`.
Program list(const std::vector<Term>& elems, const Type& elem);
Program add();
Program list_it();

/// `M ; N` as (λz.set(gr, z) ∥ N) M, discarding the value of M into `gr`.
Program seq(const Term& m, const Term& n, const std::string& gr = "gr");

/// Normal form under the full relation, leftmost-outermost first.
/// nullopt if `fuel` steps do not suffice.
std::optional<Program> normalize(const Program& p, std::size_t fuel = 200000);

/// Decoders expect a value; they normalize it first. A leading `!` is
/// removed, so store contents can be decoded directly.
std::optional<unsigned> decode_nat(const Program& p);
std::optional<std::string> decode_word(const Program& p);

// -- size blow-up demo terms ---------------------------------------------------

Program z_term();  // λx.let !x = x in !(x x)
Program y_term();  // λx.let !x = x in §(x x)
/// f (f (… (f base))) with n copies of f.
Program chain(const Term& f, unsigned n, const Term& base);
/// Z' = λx.let !x = x in F §(x x) with F = λx.let §x = x in §set(r, x) ; !get(r).
Program zprime_term();
/// Z'ⁿ !⋆ with its regions r:1, gr:0.
SourceFile zprime_chain(unsigned n);

// -- reference programs over locations -----------------------------------------

/// λ!x.λ§z.§(set(x, let !y = get(x) in !(add ⌜2⌝ y)) ∥ z).
Program update();
/// list_it !update ⌜!x, !y, !z⌝ §§⋆ over locations x, y, z of region r.
Program run_term();
/// λ!f.λ!x.§(f x) ∥ §(f x) ∥ §(f x).
Program gen_threads();
/// gen_threads !F !⌜!x, !y, !z⌝ with F = λl.list_it !update l §§⋆.
Program run_threads_term();

/// run ∥ x⇐!⌜m⌝ ∥ y⇐!⌜n⌝ ∥ z⇐!⌜p⌝ with r:(depth, !Nat) and free locations
/// x, y, z : Reg r !Nat. run alone types at depth 1 under r:3; with the stores
/// the whole program only types at depth 0, which needs r:2.
SourceFile build_run(unsigned m, unsigned n, unsigned p, unsigned depth = 3);
/// run_threads with the same stores; types at depth 0 under r:3.
SourceFile build_run_threads(unsigned m, unsigned n, unsigned p, unsigned depth = 3);

}  // namespace lmt::enc
