#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmt/syntax.hpp"

namespace lmt {

/// `cbv_ext` is call-by-value that may also evaluate below `!`. It is the
/// relation used to run programs that build `!M` on non-values.
enum class Relation { full, outer_bang, cbv, cbv_ext };
enum class Rule { beta, bang, para, get, set, gc };

std::string relation_name(Relation r);
Relation parse_relation(const std::string& s);
std::string rule_name(Rule r);
Rule parse_rule(const std::string& s);

struct Redex {
    Rule rule;
    Address address;
    unsigned depth = 0;
    std::optional<Address> store;  // get: the store assignment consumed

    bool operator==(const Redex&) const = default;
};

class CbvSyntaxError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StaleRedex : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Why p is outside the call-by-value syntax (`!M` on a non-value, store of
/// a non-value), or nullopt when it conforms.
std::optional<std::string> cbv_violation(const Program& p);

/// Calls `visit` on every hole position of the relation's context grammar,
/// in pre-order. `store_depth` gives the depth increment of crossing a store.
void for_each_hole(const Program& p, Relation rel, const std::function<unsigned(const Node&)>& store_depth,
                   const std::function<void(const Address&, const Node&, unsigned)>& visit);

/// All redexes, sorted by (address, store address). Throws CbvSyntaxError for
/// `cbv` on non-conforming programs.
std::vector<Redex> find_redexes(const Program& p, Relation rel, const RegionContext& R);

/// Contracts a redex. Throws StaleRedex when it does not match p.
Program step(const Program& p, const Redex& r);

/// The function part of a β-redex with pending type instantiations applied.
Term peel_instances(const Term& t);

// ---------------------------------------------------------------------------

enum class StrategyKind { cbv_leftmost, shallow_first, random, deep_first };

struct Strategy {
    StrategyKind kind = StrategyKind::cbv_leftmost;
    std::uint64_t seed = 0;
};

std::string strategy_name(StrategyKind k);
StrategyKind parse_strategy(const std::string& s);

/// Raised when a shallow-first run meets a redex shallower than the level it
/// is exhausting.
class ShallowFirstViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct TraceStep {
    std::size_t index = 0;  // 1-based
    Redex redex;
    Program after;
    std::uint64_t seed = 0;
};

struct Trace {
    Program initial;
    RegionContext regions;
    Relation relation = Relation::cbv;
    Strategy strategy;
    std::vector<TraceStep> steps;

    Program final_program() const { return steps.empty() ? initial : steps.back().after; }
    std::vector<unsigned> depth_profile() const;
};

struct RunOptions {
    std::size_t fuel = 1000000;
    /// Throw ShallowFirstViolation as soon as shallow-first goes back a level.
    bool strict_shallow = true;
};

struct RunResult {
    Trace trace;
    Program final_program;
    bool halted = false;  // no redex left (false means fuel ran out)
    std::size_t max_plain_size = 0;
    std::size_t max_weighted_size = 0;
};

RunResult run(const Program& p, Relation rel, const RegionContext& R, Strategy strat, RunOptions opts = {});

/// Picks one redex from a non-empty list according to a strategy.
class Scheduler {
public:
    explicit Scheduler(Strategy s);
    std::size_t choose(const std::vector<Redex>& redexes);

private:
    Strategy strat_;
    unsigned level_ = 0;
    std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Stuck states

enum class ThreadShape { value, blocked_read, store, violation };

struct StuckThread {
    Term thread;
    ThreadShape shape;
    std::string region;  // blocked_read: the empty region
    std::string reason;  // violation: why the thread fits neither shape
};

struct StuckReport {
    std::vector<StuckThread> threads;
    bool ok() const;
    std::size_t count(ThreadShape s) const;
};

/// Splits a call-by-value normal form into values, reads on regions with no
/// assignment, and stores. Threads fitting none of these are violations.
StuckReport classify_stuck(const Program& p);

// ---------------------------------------------------------------------------
// Trace files: one JSON object per line. Line 0 records the initial program
// and its region header; later lines record step, rule, address, store,
// depth, program and seed.

void write_trace(std::ostream& os, const Trace& t);
Trace read_trace(std::istream& is);

/// Re-applies every recorded step and checks each result up to ≡.
/// Returns an empty string on success, otherwise a description of the first
/// mismatch.
std::string replay(const Trace& t);

}  // namespace lmt
