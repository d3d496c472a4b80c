#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lmt/depth.hpp"
#include "lmt/syntax.hpp"
#include "lmt/types.hpp"

namespace lmt {

struct TypedEntry {
    Usage usage = Usage::lam;
    Type type;
};
using TypedVarContext = std::map<std::string, TypedEntry>;

/// Outcome of a context/type well-formedness check.
struct Check {
    bool ok = true;
    std::string reason;
    explicit operator bool() const { return ok; }
};

/// R ↓ α: every `Reg r A` inside α has r:(δ, A) in R, and ∀-binders are
/// not free in R.
Check check_compat(const RegionContext& R, const Type& alpha);
/// R ⊢: every declared content type is compatible with R.
Check check_region_ctx(const RegionContext& R);
/// R ⊢ α.
Check check_type(const RegionContext& R, const Type& alpha);
/// R ⊢ Γ.
Check check_ctx(const RegionContext& R, const TypedVarContext& gamma);

struct TypeDerivation {
    std::string rule;
    TypedVarContext gamma;
    unsigned delta = 0;
    Term term;
    Type type;
    std::vector<TypeDerivation> premises;

    std::string to_text(const RegionContext& R) const;
};

struct TypeError {
    Address address;
    std::string rule;
    std::string expected;  // empty when not applicable
    std::string actual;
    std::string message;
};

struct TypeResult {
    std::optional<TypeDerivation> derivation;
    std::optional<TypeError> error;
    bool ok() const { return derivation.has_value(); }
    explicit operator bool() const { return ok(); }
    Type type() const { return derivation ? derivation->type : nullptr; }
};

/// Decides R; Γ ⊢^δ p : α for an annotated program. Every λ carries its
/// domain type; ∀ is introduced by `gen t.` and eliminated by `M [B]`.
/// Free memory locations are constants of their (region) type.
TypeResult typecheck(const Program& p, const RegionContext& R, const TypedVarContext& gamma = {}, unsigned delta = 0,
                     const std::map<std::string, Type>& locations = {});

std::string explain(const TypeError& err);

}  // namespace lmt
