#pragma once

#include <iosfwd>
#include <string>

#include "seqinfo/design.hpp"

namespace seqinfo {

/// Line-oriented design description; `#` starts a comment.
///
///     n1    = 4
///     sigma = 1          # optional, default 1
///     basis = z1         # or `randomized`; optional, default z1
///     cell  = 2.78, inf, stop
///     cell  = -inf, 2.78, continue:8
///
/// Cells are numbered 1..K in the order they appear; bounds accept
/// `inf`, `+inf` and `-inf`.
[[nodiscard]] TwoStageDesign parse_design_config(std::istream& in);
[[nodiscard]] TwoStageDesign parse_design_config(const std::string& text);

/// Inverse of parse_design_config (round-trip exact for the doubles).
[[nodiscard]] std::string format_design_config(const TwoStageDesign& design);

}  // namespace seqinfo
