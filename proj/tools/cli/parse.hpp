#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rankone/averaging.hpp"
#include "rankone/construction.hpp"
#include "rankone/joinings.hpp"

namespace rankone::cli {

/// "0,3,5" or "2..6" or a mix: "0,4..7".
std::vector<std::int64_t> parse_int_list(const std::string& text);
/// "1/2,1/4,1/8".
std::vector<Rational> parse_rational_list(const std::string& text);
/// "uniform:N", "delta:Z" or "z:a,z:a,..." with rational a summing to 1.
WeightSequence parse_weights(const std::string& text);
/// Comma-separated tokens, each "level:K:I" (level I of stage K) or "lo:hi".
IntervalSet parse_set(const std::string& text, const Construction& c);
/// "z1,z2".
BlockIndex parse_block(const std::string& text);

}  // namespace rankone::cli
