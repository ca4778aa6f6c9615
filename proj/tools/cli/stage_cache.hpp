#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "rankone/construction.hpp"

namespace rankone::cli {

inline constexpr int cache_format = 1;

nlohmann::json stage_to_json(const TowerStage& stage, const std::string& spec_hash);
/// Throws std::runtime_error on anything that is not a consistent stage.
TowerStage stage_from_json(const nlohmann::json& j);

struct CachedStage {
  enum class Status { Hit, Built, Invalidated, Corrupt };
  TowerStage stage;
  Status status = Status::Built;
  std::string note;
};

/// Loads stage J of c from dir, rebuilding (and rewriting) on a miss, a
/// version mismatch or a corrupt file.
CachedStage cache_stage(const Construction& c, int J, const std::filesystem::path& dir);

}  // namespace rankone::cli
