#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli/cli.hpp"
#include "cli/stage_cache.hpp"
#include "rankone/construction.hpp"

namespace fs = std::filesystem;
using namespace rankone;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::initializer_list<std::string> args) {
  std::vector<std::string> store{"rankone"};
  store.insert(store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : store) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh scratch directory holding the two spec files used below.
struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("rankone_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "odo.json") << R"({"preset":"odometer","h1":2})";
    std::ofstream(dir / "stair.json") << R"({"preset":"staircase","h1":2})";
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("return-profile csv starts at the full base") {
    Scratch s;
    const auto r = run({"return-profile", "--spec", s.path("odo.json"), "--j", "1", "--J", "3", "--z-min", "0",
                        "--z-max", "4"});
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() >= 4);
    CHECK(ls[0].rfind("# {", 0) == 0);
    CHECK(ls[2] == "z,lo,hi");
    CHECK(ls[3] == "0,1/1,1/1");
  }

  TEST_CASE("reruns are byte identical") {
    Scratch s;
    const auto a = run({"return-profile", "--spec", s.path("stair.json"), "--j", "2", "--z-max", "12", "--format",
                        "json", "--decimal"});
    const auto b = run({"return-profile", "--spec", s.path("stair.json"), "--j", "2", "--z-max", "12", "--format",
                        "json", "--decimal"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j.at("rows").size() == 13);
  }

  TEST_CASE("validation and escape exit codes") {
    Scratch s;
    CHECK(run({"return-profile", "--spec", s.path("odo.json"), "--j", "1", "--z-min", "5", "--z-max", "4"}).code ==
          cli::Validation);
    CHECK(run({"return-profile", "--spec", s.path("missing.json"), "--j", "1", "--z-max", "4"}).code ==
          cli::Validation);
    CHECK(run({"flow", "bands", "--spec", s.path("stair.json"), "--j", "3", "--J", "6", "--side", "left",
               "--offsets", "0"})
              .code == cli::Validation);
    const auto e = run({"orbit", "--spec", s.path("stair.json"), "--stage-budget", "4", "--x0", "0", "--steps",
                        "1000"});
    CHECK(e.code == cli::OrbitEscape);
    CHECK(e.err.find("7") != std::string::npos);
  }

  TEST_CASE("stage cache round trip") {
    Scratch s;
    const auto dir = s.dir / "cache";
    Construction c(ConstructionSpec::staircase(2, 7));
    const auto built = cli::cache_stage(c, 5, dir);
    CHECK(built.status == cli::CachedStage::Status::Built);
    const auto hit = cli::cache_stage(c, 5, dir);
    CHECK(hit.status == cli::CachedStage::Status::Hit);
    CHECK(hit.stage.level_start == c.stage(5)->level_start);
    CHECK(hit.stage.base_width == c.stage(5)->base_width);

    fs::path file;
    for (const auto& e : fs::directory_iterator(dir)) file = e.path();
    auto j = nlohmann::json::parse(slurp(file));
    j["tool_version"] = "0.0.0";
    std::ofstream(file) << j.dump();
    CHECK(cli::cache_stage(c, 5, dir).status == cli::CachedStage::Status::Invalidated);
    CHECK(cli::cache_stage(c, 5, dir).status == cli::CachedStage::Status::Hit);

    std::ofstream(file) << "not json";
    CHECK(cli::cache_stage(c, 5, dir).status == cli::CachedStage::Status::Corrupt);
    CHECK(cli::cache_stage(c, 5, dir).status == cli::CachedStage::Status::Hit);

    // A consistent file with a broken permutation is also rejected.
    j = nlohmann::json::parse(slurp(file));
    auto starts = j.at("level_start");
    std::swap(starts[0], starts[1]);
    starts[0] = starts[1];
    j["level_start"] = starts;
    std::ofstream(file) << j.dump();
    CHECK(cli::cache_stage(c, 5, dir).status == cli::CachedStage::Status::Corrupt);

    const auto note = run({"build", "--spec", s.path("stair.json"), "--stage", "3", "--cache", dir.string()});
    CHECK(note.code == 0);
    const auto again = run({"build", "--spec", s.path("stair.json"), "--stage", "3", "--cache", dir.string()});
    CHECK(again.err.find("cache hit") != std::string::npos);
    CHECK(note.out == again.out);
  }

  TEST_CASE("config runner") {
    Scratch s;
    const auto out = s.dir / "out";
    nlohmann::json cfg = {
        {"output_dir", out.string()},
        {"format", "json"},
        {"experiments",
         {{{"name", "rp"},
           {"command", "return-profile"},
           {"spec", s.path("odo.json")},
           {"params", {{"j", 1}, {"J", 3}, {"z-max", 4}}}},
          {{"name", "fw"},
           {"command", "flow window"},
           {"spec", s.path("stair.json")},
           {"params", {{"j", 3}, {"J", 6}, {"grid", 2}, {"z-min", 1}, {"z-max", 6}}}}}}};
    std::ofstream(s.dir / "cfg.json") << cfg.dump();
    const auto r = run({"run", "--config", s.path("cfg.json")});
    REQUIRE(r.code == 0);
    const auto rp = nlohmann::json::parse(slurp(out / "rp.json"));
    CHECK(rp.at("meta").at("command") == "return-profile");
    CHECK(rp.at("rows").size() == 5);
    CHECK(fs::exists(out / "fw.json"));

    // One bad experiment stops the whole run before anything is written.
    cfg["output_dir"] = (s.dir / "out2").string();
    cfg["experiments"][1]["params"]["z-min"] = 9;
    std::ofstream(s.dir / "bad.json") << cfg.dump();
    CHECK(run({"run", "--config", s.path("bad.json")}).code == cli::Validation);
    CHECK_FALSE(fs::exists(s.dir / "out2"));
  }
}
