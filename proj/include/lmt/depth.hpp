#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lmt/syntax.hpp"

namespace lmt {

enum class Usage { lam, para, bang };
using VarContext = std::map<std::string, Usage>;

std::string usage_name(Usage u);

/// One node of a depth derivation `R; Γ ⊢^δ P`.
struct DepthDerivation {
    std::string rule;
    VarContext gamma;
    unsigned delta = 0;
    Term term;
    std::vector<DepthDerivation> premises;

    /// Indented text tree, conclusion first and premises below it.
    std::string to_text(const RegionContext& R) const;
    std::size_t node_count() const;
};

struct WfError {
    Address address;
    std::string rule;
    std::string criterion;  // the well-formedness criterion that is violated
    std::string message;
};

struct WfResult {
    std::optional<DepthDerivation> derivation;
    std::optional<WfError> error;
    bool ok() const { return derivation.has_value(); }
    explicit operator bool() const { return ok(); }
};

/// Decides R; Γ ⊢^δ p. Free memory locations of reference programs are
/// passed in `locations`; they behave as constants of their region type.
WfResult check_wf(const Program& p, const RegionContext& R, const VarContext& gamma = {}, unsigned delta = 0,
                  const std::map<std::string, Type>& locations = {});

std::string explain(const WfError& err);

}  // namespace lmt
