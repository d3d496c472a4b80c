#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "lmt/reduce.hpp"

namespace lmt {

/// No pair of steps reproduces the swapped sequence: a counterexample to the
/// swapping lemma on this instance.
class NoSwapFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Given p →ᵢ p₁ →ⱼ p₂ with i > j (outer-bang steps), finds p →ⱼ p' →ᵢ p₂'
/// with p₂' ≡ p₂ by enumerating candidate redexes. The second returned
/// step records p₂ itself so that later steps of a trace stay valid.
std::pair<TraceStep, TraceStep> swap_adjacent(const Program& p, const TraceStep& s1, const TraceStep& s2,
                                              const RegionContext& R, Relation rel = Relation::outer_bang);

struct ReorderResult {
    Trace trace;
    std::size_t traversals = 0;  // passes over the trace, the final swap-free one included
    std::size_t swaps = 0;
};

/// Bubble sort on the depth profile. The result is an outer-bang trace.
ReorderResult reorder_shallow_first(const Trace& t);

bool is_shallow_first(const std::vector<unsigned>& profile);
bool is_shallow_first(const Trace& t);

}  // namespace lmt
