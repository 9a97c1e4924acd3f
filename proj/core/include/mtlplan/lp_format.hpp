// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "mtlplan/milp.hpp"

namespace mtlplan::lp_format {

/// Writes the model in the industry LP file format (Minimize / Subject To /
/// Bounds / Binaries / End). Deterministic output for identical models.
std::string export_lp_text(const milp::MilpModel& model,
                           const std::string& name = "model");

/// Parses LP-format text back into a model (the subset export_lp_text emits,
/// plus Maximize). Round trip is objective-exact.
milp::MilpModel parse_lp_text(const std::string& text);

}  // namespace mtlplan::lp_format
