#include "rankone/spec_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rankone {

using nlohmann::json;

namespace {

CutRule cut_rule_from_json(const json& j) {
  if (j.is_number_integer()) return CutRule::constant(j.get<std::int64_t>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "j") return CutRule::stage_index(0);
    if (s == "j+1") return CutRule::stage_index(1);
    throw std::invalid_argument("unknown cut_rule '" + s + "' (expected \"j\", \"j+1\", int or list)");
  }
  if (j.is_array()) return CutRule::from_list(j.get<std::vector<std::int64_t>>());
  if (j.is_object() && j.contains("stage_index")) return CutRule::stage_index(j.at("stage_index").get<std::int64_t>());
  throw std::invalid_argument("cut_rule must be an integer, \"j\", \"j+1\", {\"stage_index\": k} or a list");
}

SpacerRule spacer_rule_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "staircase") return SpacerRule::staircase();
    if (s == "none") return SpacerRule::none();
    if (s == "chacon") return SpacerRule::repeated({0, 1, 0});
    throw std::invalid_argument("unknown spacer_rule '" + s + "'");
  }
  if (j.is_array()) return SpacerRule::from_list(j.get<std::vector<std::vector<std::int64_t>>>());
  if (j.is_object()) {
    if (j.contains("pattern")) return SpacerRule::repeated(j.at("pattern").get<std::vector<std::int64_t>>());
    if (j.contains("random")) {
      const auto& r = j.at("random");
      return SpacerRule::random(r.value("min", std::int64_t{0}), r.at("max").get<std::int64_t>());
    }
  }
  throw std::invalid_argument("spacer_rule must be a preset name, {\"pattern\": [...]}, "
                              "{\"random\": {...}} or a list of per-stage vectors");
}

json cut_rule_to_json(const CutRule& r) {
  switch (r.kind) {
    case CutRule::Kind::Constant: return r.value;
    case CutRule::Kind::StageIndex: return json{{"stage_index", r.value}};
    case CutRule::Kind::List: return r.list;
  }
  return nullptr;
}

json spacer_rule_to_json(const SpacerRule& r) {
  switch (r.kind) {
    case SpacerRule::Kind::Staircase: return "staircase";
    case SpacerRule::Kind::None: return "none";
    case SpacerRule::Kind::Pattern: return json{{"pattern", r.pattern}};
    case SpacerRule::Kind::Random: return json{{"random", {{"min", r.random_min}, {"max", r.random_max}}}};
    case SpacerRule::Kind::List: return r.list;
  }
  return nullptr;
}

}  // namespace

namespace {

ConstructionSpec parse_spec(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("construction spec must be a JSON object");
  const std::string preset = j.value("preset", std::string("custom"));
  if (!j.contains("h1")) throw std::invalid_argument("construction spec is missing \"h1\"");
  const auto h1 = j.at("h1").get<std::int64_t>();
  const int max_stage = j.value("max_stage", 10);

  ConstructionSpec spec;
  if (preset == "staircase") {
    spec = ConstructionSpec::staircase(h1, max_stage);
  } else if (preset == "odometer") {
    spec = ConstructionSpec::odometer(h1, max_stage);
  } else if (preset == "chacon") {
    spec = ConstructionSpec::chacon(h1, max_stage);
  } else if (preset == "random") {
    if (!j.contains("seed")) throw std::invalid_argument("random preset requires an explicit \"seed\"");
    spec = ConstructionSpec::random(h1, 3, 0, 3, j.at("seed").get<std::uint64_t>(), max_stage);
  } else if (preset == "custom") {
    if (!j.contains("cut_rule") || !j.contains("spacer_rule"))
      throw std::invalid_argument("custom preset requires both \"cut_rule\" and \"spacer_rule\"");
    spec.preset = "custom";
    spec.h1 = h1;
    spec.max_stage = max_stage;
  } else {
    throw std::invalid_argument("unknown preset '" + preset + "'");
  }

  if (j.contains("cut_rule")) spec.cut_rule = cut_rule_from_json(j.at("cut_rule"));
  if (j.contains("spacer_rule")) spec.spacer_rule = spacer_rule_from_json(j.at("spacer_rule"));
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("tail_bound")) spec.tail_bound = parse_rational(j.at("tail_bound").get<std::string>());
  spec.validate();
  return spec;
}

}  // namespace

ConstructionSpec spec_from_json(const json& j) {
  try {
    return parse_spec(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed construction spec: ") + e.what());
  }
}

json spec_to_json(const ConstructionSpec& spec) {
  json j{{"preset", spec.preset},
         {"h1", spec.h1},
         {"max_stage", spec.max_stage},
         {"cut_rule", cut_rule_to_json(spec.cut_rule)},
         {"spacer_rule", spacer_rule_to_json(spec.spacer_rule)}};
  if (spec.seed) j["seed"] = *spec.seed;
  if (spec.tail_bound) j["tail_bound"] = to_string(*spec.tail_bound);
  return j;
}

ConstructionSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spec file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("spec file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return spec_from_json(j);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string spec_hash(const ConstructionSpec& spec) { return fnv1a_hex(spec_to_json(spec).dump()); }

json interval_set_to_json(const IntervalSet& set) {
  json out = json::array();
  for (const auto& iv : set.intervals()) out.push_back({to_string(iv.lo), to_string(iv.hi)});
  return out;
}

IntervalSet interval_set_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("interval set must be a JSON array of pairs");
  std::vector<Interval> parts;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2)
      throw std::invalid_argument("interval must be a [lo, hi] pair of rational strings");
    parts.push_back({parse_rational(pair[0].get<std::string>()), parse_rational(pair[1].get<std::string>())});
  }
  return IntervalSet::canonicalize(std::move(parts));
}

}  // namespace rankone
