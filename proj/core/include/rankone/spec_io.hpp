#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "rankone/construction.hpp"
#include "rankone/interval_set.hpp"

namespace rankone {

// ConstructionSpec files:
//   {"preset": "staircase"|"odometer"|"chacon"|"random"|"custom",
//    "h1": 2, "max_stage": 10,
//    "cut_rule": 3 | "j" | "j+1" | {"stage_index": k} | [r1, r2, ...],
//    "spacer_rule": "staircase" | "none" | "chacon" | {"pattern": [0,1,0]}
//                   | {"random": {"min": 0, "max": 3}} | [[s..], [s..], ...],
//    "seed": 17, "tail_bound": "1/100"}
// Omitted rules fall back to the preset's defaults.

ConstructionSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ConstructionSpec& spec);
ConstructionSpec load_spec(const std::filesystem::path& path);

/// FNV-1a over the canonical JSON form, as 16 hex digits.
std::string spec_hash(const ConstructionSpec& spec);

/// IntervalSet as [["lo_num/lo_den", "hi_num/hi_den"], ...].
nlohmann::json interval_set_to_json(const IntervalSet& set);
IntervalSet interval_set_from_json(const nlohmann::json& j);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace rankone
