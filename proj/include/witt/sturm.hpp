#pragma once

#include <utility>
#include <vector>

#include "witt/poly.hpp"

namespace witt {

// Isolating intervals for the distinct real roots of f in the open interval
// (lo, hi), sorted ascending and pairwise disjoint. A non-degenerate pair
// (a, b) is an open interval holding exactly one root with f(a), f(b) != 0;
// a pair with a == b is an exact rational root. Requires f nonzero and
// f(lo) != 0, f(hi) != 0. Multiplicities are ignored (the Sturm chain is
// built from the squarefree part).
std::vector<std::pair<Rat, Rat>> isolate_real_roots(const PolyQ& f,
                                                    const Rat& lo,
                                                    const Rat& hi);

// One sample point per root-free gap of (lo, hi), given the isolating
// intervals: k intervals yield k + 1 points, strictly separating the roots.
// Every returned point lies in [lo, hi] and is not a root.
std::vector<Rat> gap_points(const std::vector<std::pair<Rat, Rat>>& intervals,
                            const Rat& lo, const Rat& hi);

}  // namespace witt
