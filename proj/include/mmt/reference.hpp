#pragma once

// Serial dense reference implementations used as oracles by the test suite
// and as the baseline in the benchmark.  Independent of the sparse kernel:
// dense arbitrary-precision matrices and the plain textbook algorithm,
// no shared elimination code.

#include <vector>

#include "mmt/zchain.hpp"

namespace mmt::ref {

// Invariant factors of a dense integer matrix (positive, divisibility chain).
std::vector<BigInt> dense_smith(std::vector<std::vector<BigInt>> m);

CohomologyReport cohomology_dense(const IntegerComplex& c);

} // namespace mmt::ref
