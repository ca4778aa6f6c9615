#include "stage_cache.hpp"

#include <fstream>
#include <stdexcept>

#include "rankone/spec_io.hpp"
#include "rankone/version.hpp"

namespace rankone::cli {

nlohmann::json stage_to_json(const TowerStage& st, const std::string& spec_hash) {
  return {{"format", cache_format},
          {"tool_version", rankone::version},
          {"spec_hash", spec_hash},
          {"stage", st.stage},
          {"height", st.height},
          {"base_width", to_string(st.base_width)},
          {"total_measure", to_string(st.total_measure)},
          {"level_start", st.level_start}};
}

TowerStage stage_from_json(const nlohmann::json& j) {
  TowerStage st;
  try {
    st.stage = j.at("stage").get<int>();
    st.height = j.at("height").get<std::int64_t>();
    st.base_width = parse_rational(j.at("base_width").get<std::string>());
    st.total_measure = parse_rational(j.at("total_measure").get<std::string>());
    st.level_start = j.at("level_start").get<std::vector<std::int64_t>>();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("malformed stage record: ") + e.what());
  }
  if (st.height < 1 || static_cast<std::int64_t>(st.level_start.size()) != st.height)
    throw std::runtime_error("stage record has inconsistent height");
  if (st.total_measure != st.base_width * static_cast<long>(st.height))
    throw std::runtime_error("stage record has inconsistent measure");
  st.level_at_unit.assign(static_cast<std::size_t>(st.height), -1);
  for (std::int64_t i = 0; i < st.height; ++i) {
    const auto u = st.level_start[static_cast<std::size_t>(i)];
    if (u < 0 || u >= st.height || st.level_at_unit[static_cast<std::size_t>(u)] != -1)
      throw std::runtime_error("stage record levels are not a permutation");
    st.level_at_unit[static_cast<std::size_t>(u)] = i;
  }
  return st;
}

CachedStage cache_stage(const Construction& c, int J, const std::filesystem::path& dir) {
  const std::string hash = spec_hash(c.spec());
  const auto file = dir / (hash + "-stage" + std::to_string(J) + ".json");
  CachedStage out;
  if (std::filesystem::exists(file)) {
    try {
      std::ifstream in(file);
      const auto j = nlohmann::json::parse(in);
      if (j.at("format").get<int>() != cache_format || j.at("tool_version").get<std::string>() != rankone::version) {
        out.status = CachedStage::Status::Invalidated;
        out.note = "cache entry " + file.string() + " was written by another version; rebuilding";
      } else if (j.at("spec_hash").get<std::string>() != hash || j.at("stage").get<int>() != J) {
        throw std::runtime_error("cache entry belongs to a different stage");
      } else {
        out.stage = stage_from_json(j);
        out.status = CachedStage::Status::Hit;
        out.note = "cache hit " + file.string();
        return out;
      }
    } catch (const std::exception& e) {
      out.status = CachedStage::Status::Corrupt;
      out.note = "corrupt cache entry " + file.string() + " (" + e.what() + "); rebuilding";
    }
  }
  out.stage = *c.stage(J);
  std::filesystem::create_directories(dir);
  std::ofstream o(file);
  o << stage_to_json(out.stage, hash).dump() << '\n';
  if (!o) throw std::runtime_error("cannot write cache entry " + file.string());
  return out;
}

}  // namespace rankone::cli
