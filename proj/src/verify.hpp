#pragma once

#include <string>

#include "masking.hpp"

namespace bansa {

// Brute-force cross-checks of the analytic properties, written against
// independently coded reference routines. Appends one "ok"/"FAIL" line per
// check to `out` and returns the number of failures.
int run_oracle_suite(std::string& out);

namespace reference {

// Long-double, separately structured implementations used as oracles.
double map_entropy(const AttentionMap& map);
double two_pass_disagreement(const AttentionEnsemble& ensemble);

}  // namespace reference

}  // namespace bansa
