#pragma once

#include "qhl/semantics.hpp"

namespace qhl::detail {

/// Gate of an ApplyU embedded in ctx. Throws if the name is unknown.
CMatrix resolve_gate(const Tables& tables, const VarContext& ctx, const ApplyU& x);

/// Embedded measurement operators, one per outcome.
std::vector<CMatrix> resolve_measurement(const Tables& tables, const VarContext& ctx,
                                         const std::string& meas,
                                         const std::vector<std::string>& vars);

}  // namespace qhl::detail
