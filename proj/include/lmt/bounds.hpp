#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "lmt/reduce.hpp"
#include "lmt/syntax.hpp"

namespace lmt {

/// ⟨p⟩ᵢ. A `let !x = !M in N` met at index 0 becomes
/// `let !x = bag k (!M) in ⟨N⟩₀` with k = fo(x, ⟨N⟩₀). A store on r
/// unfolds its content at index i − R(r) (and leaves it alone below R(r)),
/// so the index always tracks revised depth.
Program unfold(const Program& p, unsigned i, const RegionContext& R);

/// Weighted size of ⟨p'⟩ᵢ ≤ weighted size of ⟨p⟩ᵢ for p → p' at depth i.
struct MonotoneCheck {
    std::size_t before = 0;
    std::size_t after = 0;
    bool holds() const { return after <= before; }
    bool strict() const { return after < before; }
};
MonotoneCheck check_unfold_monotone(const Program& p, const Redex& r, const RegionContext& R);

/// For every i ≤ d(p): fo_all(⟨p⟩ᵢ) ≤ |p| and |⟨p⟩ᵢ| ≤ |p|·(|p|−1).
struct QuadraticCheck {
    std::size_t size = 0;
    unsigned failing_depth = 0;
    std::string failure;  // empty when both inequalities hold at every depth
    bool holds() const { return failure.empty(); }
};
QuadraticCheck check_quadratic(const Program& p, const RegionContext& R);

/// Exhausts the depth-i redexes of p (leftmost first, full relation) and
/// compares the result with |p|·(|p|−1) and the sequence length with |p|.
struct SquaringCheck {
    std::size_t size = 0;
    std::size_t final_size = 0;
    std::size_t length = 0;
    Program result;
    bool exhausted = true;  // false if the fuel ran out
    bool size_ok() const { return final_size <= size * (size == 0 ? 0 : size - 1); }
    bool length_ok() const { return length <= size; }
    bool holds() const { return exhausted && size_ok() && length_ok(); }
};
SquaringCheck check_squaring(const Program& p, unsigned i, const RegionContext& R, std::size_t fuel = 1000000);

/// n^(2^d), saturating at UINT64_MAX.
std::uint64_t poly_bound(std::uint64_t n, unsigned d);

struct BoundReport {
    std::size_t plain_size = 0;
    std::size_t weighted_size = 0;  // the n of the bound
    unsigned depth = 0;
    std::uint64_t bound = 0;
    std::size_t steps = 0;
    std::size_t max_weighted_size = 0;
    std::size_t max_plain_size = 0;
    std::size_t final_weighted_size = 0;
    bool well_formed = false;
    bool halted = false;
    bool steps_ok = false;
    bool size_ok = false;
    std::string note;
    bool pass() const { return well_formed && halted && steps_ok && size_ok; }
    std::string to_text() const;
};

class BoundViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs p to termination and checks steps and every intermediate weighted
/// size against n^(2^d). Ill-formed programs are never certified.
BoundReport verify_bound(const Program& p, const RegionContext& R, Strategy strat, Relation rel,
                         std::size_t fuel_cap = 10000000);
/// As verify_bound, but throws BoundViolation unless the report passes.
BoundReport certify_bound(const Program& p, const RegionContext& R, Strategy strat, Relation rel);

}  // namespace lmt
