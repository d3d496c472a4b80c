#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace lmt {

enum class TypeKind { behaviour, var, unit, arrow, bang, para, forall, region };

struct TypeNode;
using Type = std::shared_ptr<const TypeNode>;

/// Effect annotation on an arrow: a set of region names. Carried and printed,
/// never constrained.
using Effect = std::set<std::string>;

struct TypeNode {
    TypeKind kind;
    std::string name;  // type variable, forall binder or region constant
    Type left;         // arrow domain, modal/forall/region body
    Type right;        // arrow codomain
    Effect eff_in;
    Effect eff_out;
};

namespace ty {
Type behaviour();
Type unit();
Type var(std::string name);
Type arrow(Type dom, Type cod, Effect e1 = {}, Effect e2 = {});
Type bang(Type body);
Type para(Type body);
Type forall(std::string binder, Type body);
Type region(std::string r, Type content);
}  // namespace ty

/// Result types are every type except the behaviour type B.
bool is_result_type(const Type& t);

std::set<std::string> free_type_vars(const Type& t);
std::set<std::string> regions_of(const Type& t);

/// Capture-avoiding A[B/t].
Type subst_type(const Type& a, const Type& b, const std::string& t);

/// Equality up to renaming of forall binders, ignoring effects.
bool type_equal(const Type& a, const Type& b);

std::string to_string(const Type& t);

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

}  // namespace lmt
