#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmt/types.hpp"

namespace lmt {

/// Node kinds. `gen` and `inst` are type-annotation wrappers: they are
/// invisible to addressing, depth and size. `nu` only appears in programs of
/// the reference language, `bag` only in unfolded programs.
enum class Kind {
    var,
    region,
    unit,
    lam,
    app,
    bang,
    para,
    let_bang,
    let_para,
    get,
    set,
    store,
    par,
    gen,
    inst,
    nu,
    bag,
};

struct Node;
using Term = std::shared_ptr<const Node>;
using Program = Term;

struct Node {
    Kind kind;
    // Variable or region name, binder name, get/set/store target, or the
    // type variable of a `gen`.
    std::string name;
    // get/set/store: the target is a variable (a memory location, or a
    // variable that will be instantiated by a region constant).
    bool var_target = false;
    // lam: optional domain annotation; inst: type argument; nu: location type.
    Type annot;
    Term first;
    Term second;
    std::size_t copies = 0;  // bag only
};

namespace term {
Term var(std::string x);
Term region(std::string r);
Term unit();
Term lam(std::string x, Term body, Type annot = nullptr);
Term app(Term fun, Term arg);
Term app(std::initializer_list<Term> spine);
Term bang(Term body);
Term para(Term body);
Term let_bang(std::string x, Term bound, Term body);
Term let_para(std::string x, Term bound, Term body);
Term get(std::string r);
Term set(std::string r, Term value);
Term store(std::string r, Term value);
Term get_loc(std::string x);
Term set_loc(std::string x, Term value);
Term store_loc(std::string x, Term value);
Term par(Term left, Term right);
Term par(const std::vector<Term>& threads);
Term gen(std::string t, Term body);
Term inst(Term body, Type arg);
Term nu(std::string x, Type annot, Term body);
Term bag(std::size_t copies, Term body);
/// `\!x. M` and `\$x. M`: λx.let †x = x in M.
Term lam_bang(std::string x, Term body, Type annot = nullptr);
Term lam_para(std::string x, Term body, Type annot = nullptr);
}  // namespace term

/// Copy of `t` with replaced children.
Term with_children(const Term& t, Term first, Term second);

bool is_wrapper(Kind k);
/// Skips gen/inst wrappers.
const Term& strip(const Term& t);
/// Number of addressable children of a (non-wrapper) node.
int arity(Kind k);
const Term& child(const Node& n, int i);

std::string kind_name(Kind k);

// ---------------------------------------------------------------------------
// Addresses

class Address {
public:
    Address() = default;
    explicit Address(std::vector<std::uint8_t> path) : path_(std::move(path)) {}
    static Address parse(const std::string& text);

    const std::vector<std::uint8_t>& path() const { return path_; }
    std::size_t size() const { return path_.size(); }
    bool empty() const { return path_.empty(); }
    Address child(std::uint8_t i) const;
    Address parent() const;
    bool is_prefix_of(const Address& other) const;
    std::string to_string() const;  // "ε" for the root
    std::string to_bits() const;    // "" for the root

    auto operator<=>(const Address&) const = default;

private:
    std::vector<std::uint8_t> path_;
};

/// Fetches the (stripped) subterm at an address; throws std::out_of_range.
const Term& at(const Program& p, const Address& w);
bool valid_address(const Program& p, const Address& w);
/// Replaces the subterm at `w`, keeping annotation wrappers above it.
Program replace_at(const Program& p, const Address& w, Term replacement);

/// Visits every occurrence in pre-order (left to right).
void for_each_occurrence(const Program& p, const std::function<void(const Address&, const Node&)>& visit);
std::map<Address, Kind> occurrences(const Program& p);

// ---------------------------------------------------------------------------
// Regions, depth and size

struct RegionInfo {
    unsigned depth = 0;
    Type content;  // null in untyped contexts
};

class RegionContext {
public:
    RegionContext() = default;
    RegionContext(std::initializer_list<std::pair<const std::string, unsigned>> depths);

    void declare(const std::string& r, unsigned depth, Type content = nullptr);
    bool contains(const std::string& r) const { return entries_.count(r) != 0; }
    unsigned depth(const std::string& r) const;
    Type content(const std::string& r) const;
    const std::map<std::string, RegionInfo>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::string to_string() const;

private:
    std::map<std::string, RegionInfo> entries_;
};

class MissingRegion : public std::runtime_error {
public:
    explicit MissingRegion(const std::string& r) : std::runtime_error("region #" + r + " is not declared"), region(r) {}
    std::string region;
};

std::set<std::string> regions_of(const Program& p);

/// Revised depth: † labels strictly above the node plus R(r) per crossed store.
unsigned depth_of(const Program& p, const Address& w, const RegionContext& R);
unsigned depth(const Program& p, const RegionContext& R);

enum class SizeConvention { plain, weighted };
std::size_t size(const Program& p, SizeConvention c = SizeConvention::plain);
std::size_t size_at(const Program& p, unsigned i, const RegionContext& R, SizeConvention c = SizeConvention::plain);

// ---------------------------------------------------------------------------
// Variables and substitution

std::set<std::string> free_vars(const Program& p);
std::size_t count_occ(const std::string& x, const Program& p);
/// Total number of free variable occurrences; names in `constants` are skipped.
std::size_t count_all_free(const Program& p, const std::set<std::string>& constants = {});

/// Capture-avoiding M[N/x]. A get/set/store whose target variable is `x`
/// is retargeted when N is a variable or a region constant.
Term substitute(const Term& m, const std::string& x, const Term& n);
/// M[B/t] on every type annotation of M.
Term substitute_type(const Term& m, const std::string& t, const Type& b);
std::set<std::string> free_type_vars(const Term& m);

/// Removes gen/inst wrappers and lambda annotations.
Program erase(const Program& p);
bool has_annotation_nodes(const Program& p);

/// Values: x | * | r | \x.M | †V (wrappers are transparent).
bool is_value(const Term& t);

/// α-renaming plus commutativity/associativity of parallel composition,
/// computed on erased programs.
std::string canonical_form(const Program& p);
bool struct_equiv(const Program& p, const Program& q);
bool alpha_equiv(const Program& p, const Program& q);

/// The top-level parallel chain, flattened.
std::vector<Term> threads(const Program& p);
/// True iff every leaf of the parallel chain is a store.
bool is_store_program(const Term& t);

}  // namespace lmt
