#pragma once

// Greedy minimum-entropy coupling of two marginals.

#include <string_view>

#include "infocouple/probdist.hpp"

namespace infocouple::mec {

enum class Method { max_seeking, zero_seeking };

Method parse_method(std::string_view name);
std::string_view to_string(Method method);

// Pairs the largest residual masses of p and q (lowest index on ties), assigns
// the smaller of the two and subtracts it from both, until both are exhausted.
Coupling max_seeking(const Distribution& p, const Distribution& q);

// Like max_seeking, but each round pairs the residuals whose masses are
// closest, lowest (i, j) first on ties.
Coupling zero_seeking(const Distribution& p, const Distribution& q);

Coupling couple(const Distribution& p, const Distribution& q, Method method);

Bits joint_entropy(const Coupling& c) noexcept;

}  // namespace infocouple::mec
