#pragma once

#include <string>
#include <string_view>

#include "advr/domain.hpp"

namespace advr {

// Compiled-in defaults used when no data paths are given on the command line.
// Each mirrors a file under data/; tests assert the two stay in sync.
const std::string& builtin_norms_json();
const std::string& builtin_guideline_json(std::string_view name);  // "niaaa" or "iwg2"

NormTable builtin_norm_table();
ReferenceRanges builtin_reference_ranges();

}  // namespace advr
