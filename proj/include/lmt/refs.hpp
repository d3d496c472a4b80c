#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmt/reduce.hpp"
#include "lmt/syntax.hpp"

namespace lmt::refs {

/// Free memory locations and their `Reg r A` types.
using Locations = std::map<std::string, Type>;

/// A reference-language state: a program whose ν binders at evaluation
/// positions have been extruded to global locations.
struct NuState {
    Program program;
    Locations locations;
};

/// Extrudes every ν at an evaluation position to a fresh global location.
NuState normalize(const NuState& s, Relation rel = Relation::cbv);

/// Redexes of a normalized state: the region rules (β, !, §, gc) plus
/// get/set on locations. get reads the store of its location without
/// consuming it; set overwrites that store, or creates it.
std::vector<Redex> find_redexes(const NuState& s, Relation rel = Relation::cbv);
NuState step(const NuState& s, const Redex& r, Relation rel = Relation::cbv);

struct NuStep {
    Redex redex;
    NuState after;
    /// set only: the value the location held before the write.
    Term overwritten;
};

struct NuRun {
    NuState initial;  // normalized
    std::vector<NuStep> steps;
    NuState final_state;
    bool halted = false;
    /// Locations read at an evaluation position but never assigned.
    std::vector<std::string> unassigned_reads;
};

NuRun run(const NuState& s, Relation rel, Strategy strat, std::size_t fuel = 1000000);

/// Content of the store for location x, if any (at top level).
std::optional<Term> lookup(const Program& p, const std::string& x);

class TranslationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Replaces locations by their region constants. `get x` becomes
/// `let !y = get(r) in (set(r, !y) ∥ !y)`, so contents must be of a `!A` type.
/// Variables bound by λ or let that stand for locations stay variables.
Program translate(const NuState& s);

struct SimulationReport {
    bool ok = true;
    std::size_t nu_steps = 0;
    /// Region steps used to match each ν step.
    std::vector<std::size_t> region_steps;
    std::string failure;
};

/// Checks that the region translation reproduces a ν run step by step: each
/// ν state, translated, is reached up to ≡ and garbage stores left by
/// overwrites. A set takes exactly one region step; the others at least one.
SimulationReport check_simulation(const NuRun& run, const RegionContext& R, Relation rel = Relation::cbv,
                                  std::size_t max_steps = 6);

}  // namespace lmt::refs
