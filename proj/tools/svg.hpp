#pragma once
// Minimal SVG rendering of domains, exploration paths and traces.

#include <iosfwd>
#include <vector>

#include "he/lattice.hpp"

namespace he::svg {

// Boundary with the 1-coloured arc solid and bold and the 0-coloured arc
// dashed, plus optional paths in the same coordinates.
void write_domain(std::ostream& os, const LatticeDomain& d, const std::vector<std::vector<Complex>>& paths = {});

// Curves in the upper half-plane with the real axis drawn for reference.
void write_curves(std::ostream& os, const std::vector<std::vector<Complex>>& curves);

}  // namespace he::svg
