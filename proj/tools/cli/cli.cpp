#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "parse.hpp"
#include "report.hpp"
#include "rankone/flow_skeleton.hpp"
#include "rankone/joinings.hpp"
#include "rankone/spec_io.hpp"
#include "rankone/statistics.hpp"
#include "rankone/transform.hpp"
#include "stage_cache.hpp"

namespace rankone::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string spec;
  std::string out;
  std::string format = "csv";
  int threads = 1;
  int stage_budget = 0;
  bool decimal = false;
};

/// A nested experiment exited nonzero; carries its exit code.
struct ExperimentFailed : std::runtime_error {
  ExperimentFailed(const std::string& what, int code) : std::runtime_error(what), code(code) {}
  int code;
};

struct Leaf {
  CLI::App* app = nullptr;
  std::function<Report()> run;
};

std::string q(const Rational& x) { return to_string(x); }

ConstructionSpec load(const std::string& path, int budget) {
  if (path.empty()) throw std::invalid_argument("--spec is required");
  auto spec = load_spec(path);
  if (budget < 0) throw std::invalid_argument("--stage-budget must be positive");
  if (budget > 0) spec.max_stage = budget;
  spec.validate();
  return spec;
}

void need_stage(const Construction& c, int j, const char* name) {
  if (j < 1 || j > c.max_stage())
    throw std::invalid_argument(std::string("--") + name + "=" + std::to_string(j) + " must lie in [1, " +
                                std::to_string(c.max_stage()) + "]");
}

ordered_json bound_json(const MeasureBound& b) { return ordered_json::array({q(b.lo()), q(b.hi())}); }

// Every leaf shares the same global flags.
void add_common(CLI::App* app, Common& c) {
  app->add_option("--spec", c.spec, "construction spec (JSON)");
  app->add_option("--out", c.out, "write output here instead of stdout");
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--stage-budget", c.stage_budget, "override max_stage");
  app->add_flag("--decimal", c.decimal, "add approximate decimal columns");
}

ordered_json params_of(const CLI::App* app) {
  ordered_json p = ordered_json::object();
  for (const auto* opt : app->get_options()) {
    const auto name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
    if (name.empty() || name == "help" || name == "out" || name == "format" || name == "threads") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      std::string v;
      for (std::size_t i = 0; i < res.size(); ++i) v += (i ? "," : "") + res[i];
      p[name] = opt->get_type_size() == 0 ? ordered_json(true) : ordered_json(v);
    } else if (!opt->get_default_str().empty()) {
      p[name] = opt->get_default_str();
    }
  }
  return p;
}

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) { build(); }

  int run(int argc, const char* const* argv) {
    try {
      app_.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out_ << current_help(argc, argv);
      return Success;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app_.help("", CLI::AppFormatMode::All);
      return Success;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << '\n';
      return Validation;
    }
    for (const auto& leaf : leaves_) {
      if (!leaf.app->parsed()) continue;
      try {
        return emit(leaf);
      } catch (const ExperimentFailed& e) {
        err_ << "error: " << e.what() << '\n';
        return e.code;
      } catch (const OrbitEscaped& e) {
        err_ << "error: " << e.what() << "; the stage budget must be at least " << e.suggested_stage()
             << " (--stage-budget " << e.suggested_stage() << ")\n";
        return OrbitEscape;
      } catch (const std::invalid_argument& e) {
        err_ << "error: " << e.what() << '\n';
        return Validation;
      } catch (const std::out_of_range& e) {
        err_ << "error: " << e.what() << '\n';
        return Validation;
      } catch (const std::overflow_error& e) {
        err_ << "error: " << e.what() << " (lower max_stage)\n";
        return Validation;
      } catch (const nlohmann::json::exception& e) {
        err_ << "error: " << e.what() << '\n';
        return Validation;
      } catch (const std::exception& e) {
        err_ << "internal error: " << e.what() << '\n';
        return Internal;
      }
    }
    err_ << "error: no command given\n";
    return Validation;
  }

 private:
  std::string current_help(int argc, const char* const* argv) {
    CLI::App* target = &app_;
    for (int i = 1; i < argc; ++i) {
      for (auto* sub : target->get_subcommands({})) {
        if (sub->get_name() == argv[i]) {
          target = sub;
          break;
        }
      }
    }
    return target->help();
  }

  int emit(const Leaf& leaf) {
    Report r = leaf.run();
    r.params = params_of(leaf.app);
    const WriteOptions opts{parse_format(common_.format), common_.decimal};
    if (common_.out.empty()) {
      write_report(r, opts, out_);
      return Success;
    }
    std::ostringstream buf;
    write_report(r, opts, buf);
    const fs::path path(common_.out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    f << buf.str();
    if (!f) throw std::runtime_error("cannot write " + path.string());
    return Success;
  }

  CLI::App* leaf(CLI::App* parent, const std::string& name, const std::string& desc, std::function<Report()> fn) {
    auto* sub = parent->add_subcommand(name, desc);
    add_common(sub, common_);
    leaves_.push_back({sub, std::move(fn)});
    return sub;
  }

  Report start(const std::string& command, const ConstructionSpec& spec) {
    Report r;
    r.command = command;
    r.spec_hash = spec_hash(spec);
    return r;
  }

  Report run_config();
  void build();
  void build_joining();
  void build_flow();

  std::ostream& out_;
  std::ostream& err_;
  CLI::App app_{"Exact rank-one cutting-and-stacking experiments", "rankone"};
  Common common_;
  std::vector<Leaf> leaves_;

  // Option storage shared by the leaves; only one leaf runs per invocation.
  int stage_ = 0, j_ = 1, J_ = 0, k_stage_ = 0;
  std::int64_t z_min_ = 0, z_max_ = -1, steps_ = 0, stride_ = 1, m_max_ = 0, window_ = 0;
  std::string cache_dir_, x0_ = "0", set_a_, set_b_, weights_ = "uniform:1";
  std::string config_;

  // joining
  std::string second_, kind_ = "product", y0_ = "0", eps_ = "1/2", source_ = "0,0", shifts_, j_list_;
  std::string delta_ = "1/10", light_eps_ = "1/2";
  std::int64_t graph_k_ = 0, samples_ = 100000, stride_b_ = 1, column_w_ = 0;
  bool nonzero_ = false;

  // flow
  std::string alpha_ = "2/1", side_ = "right", offsets_ = "0", joining_ = "empirical";
  std::int64_t grid_ = 1, extent_ = -1;
  bool geometric_ = false;
};

void Cli::build() {
  app_.require_subcommand(1);
  app_.set_help_all_flag("--help-all", "show help for every command");

  auto* b = leaf(&app_, "build", "tower heights, or the levels of one stage", [this] {
    Construction c(load(common_.spec, common_.stage_budget));
    Report r = start("build", c.spec());
    if (stage_ == 0) {
      r.add_column("stage");
      r.add_column("height");
      r.add_column("base_width", true);
      r.add_column("total_measure", true);
      for (int j = 1; j <= c.max_stage(); ++j)
        r.add_row({std::to_string(j), std::to_string(c.height(j)), q(c.base_width(j)), q(c.total_measure(j))});
      return r;
    }
    need_stage(c, stage_, "stage");
    TowerStage st;
    if (!cache_dir_.empty()) {
      auto cached = cache_stage(c, stage_, cache_dir_);
      err_ << "note: " << (cached.note.empty() ? "stage built and cached" : cached.note) << '\n';
      st = std::move(cached.stage);
    } else {
      st = *c.stage(stage_);
    }
    r.summary["height"] = st.height;
    r.summary["base_width"] = q(st.base_width);
    r.summary["total_measure"] = q(st.total_measure);
    r.add_column("level");
    r.add_column("lo", true);
    r.add_column("hi", true);
    for (std::int64_t i = 0; i < st.height; ++i) {
      const auto l = st.level(i);
      r.add_row({std::to_string(i), q(l.lo), q(l.hi)});
    }
    return r;
  });
  b->add_option("--stage", stage_, "list the levels of this stage");
  b->add_option("--cache", cache_dir_, "stage cache directory");

  auto* o = leaf(&app_, "orbit", "exact orbit T^n x0", [this] {
    Construction c(load(common_.spec, common_.stage_budget));
    if (steps_ < 0) throw std::invalid_argument("--steps must be nonnegative");
    if (stride_ < 1) throw std::invalid_argument("--stride must be positive");
    Report r = start("orbit", c.spec());
    r.add_column("n");
    r.add_column("x", true);
    r.add_column("stage");
    r.add_column("level");
    OrbitPoint p{parse_rational(x0_), 0, 1};
    if (p.x < 0 || p.x >= 1) throw std::invalid_argument("--x0 must lie in [0, 1)");
    for (std::int64_t n = 0; n <= steps_; ++n) {
      if (n > 0) p = apply_power(c, p, stride_);
      int s = std::max(1, p.stage);
      while (s < c.max_stage() && c.stage(s)->level_containing(p.x) < 0) ++s;
      r.add_row({std::to_string(n * stride_), q(p.x), std::to_string(s),
                 std::to_string(c.stage(s)->level_containing(p.x))});
    }
    return r;
  });
  o->add_option("--x0", x0_, "starting point in [0,1)");
  o->add_option("--steps", steps_, "number of steps")->required();
  o->add_option("--stride", stride_, "apply T^stride per step");

  auto* rp = leaf(&app_, "return-profile", "a^z_j = mu(E_j | T^z E_j) with escape bounds", [this] {
    Construction c(load(common_.spec, common_.stage_budget));
    need_stage(c, j_, "j");
    const int J = J_ ? J_ : std::min(c.max_stage(), j_ + 3);
    need_stage(c, J, "J");
    if (z_max_ < 0 || z_min_ < 0 || z_min_ > z_max_)
      throw std::invalid_argument("empty z range: need 0 <= z-min <= z-max");
    const auto p = return_profile(c, j_, J, z_max_, common_.threads);
    Report r = start("return-profile", c.spec());
    r.summary["h_j"] = c.height(j_);
    r.summary["resolution"] = J;
    r.summary["degenerate"] = p.degenerate;
    if (z_max_ > std::max<std::int64_t>(z_min_, 0) && z_max_ > 0)
      r.summary["max_after_z_min"] = bound_json(max_profile(p, z_min_));
    r.add_column("z");
    r.add_column("lo", true);
    r.add_column("hi", true);
    for (auto z = z_min_; z <= z_max_; ++z) r.add_row({std::to_string(z), q(p.at(z).lo()), q(p.at(z).hi())});
    return r;
  });
  rp->add_option("--j", j_, "stage of the base E_j")->required();
  rp->add_option("--J", J_, "resolution stage (default j+3)");
  rp->add_option("--z-min", z_min_, "first z");
  rp->add_option("--z-max", z_max_, "last z")->required();

  auto* co = leaf(&app_, "correlate", "mu(A ∩ T^m B) for m = 0..m-max", [this] {
    Construction c(load(common_.spec, common_.stage_budget));
    const int J = J_ ? J_ : c.max_stage();
    need_stage(c, J, "J");
    if (m_max_ < 0) throw std::invalid_argument("--m-max must be nonnegative");
    const auto s = correlation_series(c, parse_set(set_a_, c), parse_set(set_b_, c), m_max_, J);
    Report r = start("correlate", c.spec());
    r.summary["mu_a"] = q(s.a.measure());
    r.summary["mu_b"] = q(s.b.measure());
    r.summary["target"] = q(s.target);
    r.add_column("m");
    r.add_column("lo", true);
    r.add_column("hi", true);
    for (std::size_t m = 0; m < s.values.size(); ++m)
      r.add_row({std::to_string(m), q(s.values[m].lo()), q(s.values[m].hi())});
    return r;
  });
  co->add_option("--a", set_a_, "set A: level:K:I or lo:hi tokens, comma separated")->required();
  co->add_option("--b", set_b_, "set B")->required();
  co->add_option("--m-max", m_max_, "largest power")->required();
  co->add_option("--J", J_, "resolution stage (default max_stage)");

  auto* bh = leaf(&app_, "blum-hanson", "averaging weights, adjoint weights and the L2 deviation", [this] {
    Construction c(load(common_.spec, common_.stage_budget));
    need_stage(c, j_, "j");
    const int J = J_ ? J_ : c.max_stage();
    need_stage(c, J, "J");
    if (window_ < 0) throw std::invalid_argument("--q must be nonnegative");
    const auto w = parse_weights(weights_);
    const auto b = adjoint_convolution(w);
    const auto e = c.stage(j_)->base();
    const auto pf = average_apply(c, w, StepFunction::indicator(e), J);
    std::int64_t span = 0;
    for (const auto& [z, a] : w.weights()) span = std::max(span, z);
    const auto profile = return_profile(c, j_, J, span, common_.threads);
    Report r = start("blum-hanson", c.spec());
    r.summary["max_a"] = q(w.max_weight());
    r.summary["flatness"] = q(flatness(w, window_));
    r.summary["l2_deviation"] = bound_json(l2_deviation(pf, e.measure()));
    r.summary["escaped"] = bound_json(pf.escaped);
    r.summary["profile_max"] = span > 0 ? bound_json(max_profile(profile, 0)) : ordered_json(nullptr);
    r.add_column("lag");
    r.add_column("b", true);
    r.add_column("within_max_a");
    for (const auto& [lag, v] : b)
      r.add_row({std::to_string(lag), q(v), v <= w.max_weight() ? "true" : "false"});
    return r;
  });
  bh->add_option("--weights", weights_, "uniform:N, delta:Z or z:a,...");
  bh->add_option("--j", j_, "stage of E_j");
  bh->add_option("--J", J_, "resolution stage (default max_stage)");
  bh->add_option("--q", window_, "flatness window");

  auto* run = app_.add_subcommand("run", "run every experiment listed in a config file");
  run->add_option("--config", config_, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  add_common(run, common_);
  leaves_.push_back({run, [this] { return run_config(); }});

  build_joining();
  build_flow();
}

namespace {

struct Pair {
  Pair(ConstructionSpec a, ConstructionSpec b) : first(std::move(a)), second(std::move(b)) {}
  Construction first;
  Construction second;
};

}  // namespace

void Cli::build_joining() {
  auto* joining = app_.add_subcommand("joining", "block-mass matrices of joinings and derived quantities");
  joining->require_subcommand(1);

  auto pair = [this] {
    const auto a = load(common_.spec, common_.stage_budget);
    const auto b = second_.empty() ? a : load(second_, common_.stage_budget);
    return std::make_shared<Pair>(a, b);
  };
  auto matrix = [this](const Pair& p) {
    need_stage(p.first, j_, "j");
    need_stage(p.second, j_, "j");
    if (kind_ == "product") return product_blocks(p.first, p.second, j_, J_ ? J_ : j_);
    if (kind_ == "graph") {
      if (!second_.empty() && second_ != common_.spec)
        throw std::invalid_argument("graph joinings are self-joinings; drop --second");
      return graph_blocks(p.first, graph_k_, j_, J_ ? J_ : std::min(p.first.max_stage(), j_ + 3));
    }
    if (kind_ == "empirical")
      return empirical_joining(p.first, p.second, {parse_rational(x0_), parse_rational(y0_), stride_, stride_b_},
                               samples_, j_, J_ ? J_ : j_);
    throw std::invalid_argument("unknown joining kind '" + kind_ + "'");
  };
  auto describe = [](Report& r, const BlockMassMatrix& m) {
    r.summary["kind"] = to_string(m.kind);
    r.summary["j"] = m.j();
    r.summary["resolution"] = m.resolution;
    r.summary["rows"] = m.rows();
    r.summary["cols"] = m.cols();
    r.summary["block_total"] = q(m.block_total());
    r.summary["residual"] = q(m.residual);
    r.summary["uncertain_mass"] = q(m.uncertain_mass);
    if (m.kind == JoiningKind::Graph) r.summary["graph_shift"] = m.graph_shift;
    if (m.kind == JoiningKind::Empirical) {
      r.summary["samples"] = m.samples;
      r.summary["seeds"] = m.seeds;
    }
  };
  auto shared = [this](CLI::App* s) {
    s->add_option("--second", second_, "spec of the second system (default: --spec)");
    s->add_option("--kind", kind_, "product, graph or empirical")
        ->check(CLI::IsMember({"product", "graph", "empirical"}));
    s->add_option("--j", j_, "block stage")->required();
    s->add_option("--J", J_, "resolution stage");
    s->add_option("--k", graph_k_, "graph shift");
    s->add_option("--N", samples_, "orbit length for empirical joinings");
    s->add_option("--x0", x0_, "orbit start in the first system");
    s->add_option("--y0", y0_, "orbit start in the second system");
    s->add_option("--stride-first", stride_, "steps of the first system per sample");
    s->add_option("--stride-second", stride_b_, "steps of the second system per sample");
  };

  auto* blocks = leaf(joining, "blocks", "joining masses of the blocks V^z_j", [=, this] {
    const auto p = pair();
    const auto m = matrix(*p);
    Report r = start("joining blocks", p->first.spec());
    describe(r, m);
    r.add_column("z1");
    r.add_column("z2");
    r.add_column("mass", true);
    for (std::int64_t a = 0; a < m.rows(); ++a)
      for (std::int64_t b = 0; b < m.cols(); ++b)
        if (!nonzero_ || m.at(a, b) != 0) r.add_row({std::to_string(a), std::to_string(b), q(m.at(a, b))});
    return r;
  });
  shared(blocks);
  blocks->add_flag("--nonzero", nonzero_, "omit empty blocks");

  auto* light = leaf(joining, "light", "eps-light block sets and their covered mass", [=, this] {
    const auto p = pair();
    const auto m = matrix(*p);
    Report r = start("joining light", p->first.spec());
    describe(r, m);
    r.add_column("eps", true);
    r.add_column("threshold", true);
    r.add_column("light_blocks");
    r.add_column("covered_mass", true);
    for (const auto& e : parse_rational_list(eps_)) {
      const auto rep = light_blocks(m, e);
      r.add_row({q(e), q(e * m.second_base), std::to_string(rep.light_set.size()), q(rep.covered_mass)});
    }
    return r;
  });
  shared(light);
  light->add_option("--eps", eps_, "eps values, comma separated");

  auto* di = leaf(joining, "di", "min over eps of the max over j of the covered light mass", [=, this] {
    const auto p = pair();
    std::vector<LightBlockReport> reports;
    const auto eps = parse_rational_list(eps_);
    const auto stages = parse_int_list(j_list_);
    for (auto j : stages) {
      j_ = static_cast<int>(j);
      const auto m = matrix(*p);
      for (const auto& e : eps) reports.push_back(light_blocks(m, e));
    }
    const auto est = di_estimate(reports);
    Report r = start("joining di", p->first.spec());
    r.summary["kind"] = kind_;
    r.summary["proxy"] = q(est.proxy);
    r.add_column("eps", true);
    r.add_column("max_covered_mass", true);
    for (const auto& [e, v] : est.per_epsilon) r.add_row({q(e), q(v)});
    return r;
  });
  shared(di);
  di->get_option("--j")->required(false);
  di->add_option("--j-list", j_list_, "stages, e.g. 2..5")->required();
  di->add_option("--eps", eps_, "eps schedule, comma separated");

  auto* disperse = leaf(joining, "disperse", "where orbit visits to one block go after n steps", [=, this] {
    const auto p = pair();
    need_stage(p->first, j_, "j");
    const int J = J_ ? J_ : j_;
    const auto rows = dispersion_experiment(p->first, p->second,
                                            {parse_rational(x0_), parse_rational(y0_), stride_, stride_b_}, samples_,
                                            j_, J, parse_block(source_), parse_int_list(shifts_));
    Report r = start("joining disperse", p->first.spec());
    r.summary["source"] = source_;
    r.summary["conditioning_count"] = rows.front().conditioning_count;
    auto per = ordered_json::array();
    r.add_column("n");
    r.add_column("z1");
    r.add_column("z2");
    r.add_column("mass", true);
    for (const auto& row : rows) {
      per.push_back({{"n", row.n}, {"max_block_mass", q(row.max_block_mass)}, {"off_tower", q(row.off_tower)}});
      for (const auto& [z, v] : row.masses) r.add_row({std::to_string(row.n), std::to_string(z.z1), std::to_string(z.z2), q(v)});
    }
    r.summary["per_shift"] = per;
    return r;
  });
  shared(disperse);
  disperse->add_option("--source", source_, "conditioning block z1,z2");
  disperse->add_option("--shifts", shifts_, "shifts n, e.g. 0,5,10")->required();

  auto* triv = leaf(joining, "trivialize", "conditional mass on F against the product target", [=, this] {
    const auto p = pair();
    const auto m = matrix(*p);
    const Rational delta = parse_rational(delta_);
    std::vector<std::int64_t> shifts =
        shifts_.empty() ? light_column_shifts(m, delta, column_w_, parse_rational(light_eps_)) : parse_int_list(shifts_);
    if (shifts.empty()) throw std::invalid_argument("no shifts h qualify for D_j; pass --shifts explicitly");
    const auto f = columns_and_F(m, delta, column_w_, shifts);
    const int k = k_stage_ ? k_stage_ : m.j();
    const int J = std::max(m.resolution, m.j());
    const auto t = trivialization_check(m, p->first, p->second, f, parse_set(set_a_, p->first),
                                        parse_set(set_b_, p->second), k, J);
    Report r = start("joining trivialize", p->first.spec());
    describe(r, m);
    r.summary["column_length"] = f.column.length;
    r.summary["shifts"] = f.shifts;
    r.summary["nu_F"] = q(f.mass);
    r.add_column("quantity");
    r.add_column("lo", true);
    r.add_column("hi", true);
    auto row = [&](const char* name, const MeasureBound& b) { r.add_row({name, q(b.lo()), q(b.hi())}); };
    row("conditional", MeasureBound::exact(t.conditional));
    row("averaged", t.averaged);
    row("identity_gap", t.identity_gap);
    row("joint", t.joint);
    row("target", MeasureBound::exact(t.target));
    row("gap", t.gap);
    row("flatness", MeasureBound::exact(t.flatness));
    return r;
  });
  shared(triv);
  triv->add_option("--delta", delta_, "column length fraction");
  triv->add_option("--w", column_w_, "column offset in the first tower");
  triv->add_option("--shifts", shifts_, "D_j (default: shifts whose columns are all light)");
  triv->add_option("--light-eps", light_eps_, "eps used for the default D_j");
  triv->add_option("--a", set_a_, "set A in the first system")->required();
  triv->add_option("--b", set_b_, "set B in the second system")->required();
  triv->add_option("--k-stage", k_stage_, "stage whose levels A and B are unions of (default j)");
}

void Cli::build_flow() {
  auto* flow = app_.add_subcommand("flow", "time-grid skeleton of a flow pair");
  flow->require_subcommand(1);

  auto* bands = leaf(flow, "bands", "band masses for the pair (S^p, S^q')", [this] {
    FlowSkeletonSpec fs{load(common_.spec, common_.stage_budget), grid_, 0, 0};
    const Rational alpha = parse_rational(alpha_);
    fs.alpha_num = alpha.get_num().get_si();
    fs.alpha_den = alpha.get_den().get_si();
    fs.validate();
    Construction c(fs.base);
    need_stage(c, j_, "j");
    const int J = J_ ? J_ : j_;
    BlockMassMatrix m = joining_ == "product"
                            ? product_blocks(c, c, j_, J)
                            : empirical_joining(c, c, {parse_rational(x0_), parse_rational(y0_), fs.alpha_num,
                                                       fs.alpha_den},
                                                samples_, j_, J);
    const BandSide side = side_ == "left" ? BandSide::Left : BandSide::Right;
    Report r = start("flow bands", c.spec());
    r.summary["alpha"] = q(alpha);
    r.summary["grid_inverse"] = grid_;
    r.summary["joining"] = joining_;
    r.summary["side"] = side_;
    r.add_column("offset");
    r.add_column("mass_num");
    r.add_column("mass_den");
    r.add_column("blocks");
    r.add_column("coarse_mass", true);
    // ξ¹_j resolution: total mass of the q × q grid cells the band touches.
    const BlockMassMatrix coarse = coarse_blocks(m, grid_);
    for (auto off : parse_int_list(offsets_)) {
      const BandQuery query{fs.alpha_num, fs.alpha_den, grid_, side, off, extent_};
      const Rational mass = band_masses(m, query);
      const auto blocks = band_blocks(query, m.rows());
      std::set<BlockIndex> cells;
      for (const auto& b : blocks) cells.insert({b.z1 / grid_, b.z2 / grid_});
      Rational cell_mass;
      for (const auto& c : cells) cell_mass += coarse.at(c.z1, c.z2);
      r.add_row({std::to_string(off), mass.get_num().get_str(), mass.get_den().get_str(),
                 std::to_string(blocks.size()), q(cell_mass)});
    }
    return r;
  });
  bands->add_option("--alpha", alpha_, "time change p/q' > 1");
  bands->add_option("--j", j_, "block stage")->required();
  bands->add_option("--J", J_, "stage for orbit resolution");
  bands->add_option("--grid", grid_, "q = 1/t_j")->check(CLI::PositiveNumber);
  bands->add_option("--side", side_, "right or left")->check(CLI::IsMember({"right", "left"}));
  bands->add_option("--offsets", offsets_, "band offsets w (right) or v (left)");
  bands->add_option("--extent", extent_, "last z of left bands (default h_j - 1)");
  bands->add_option("--joining", joining_, "empirical or product")->check(CLI::IsMember({"empirical", "product"}));
  bands->add_option("--N", samples_, "orbit length");
  bands->add_option("--x0", x0_, "start of the time-alpha coordinate");
  bands->add_option("--y0", y0_, "start of the unit-time coordinate");

  auto* window = leaf(flow, "window", "windowed return sums over z in [z-min, z-max]", [this] {
    Construction c(load(common_.spec, common_.stage_budget));
    need_stage(c, j_, "j");
    const int J = J_ ? J_ : std::min(c.max_stage(), j_ + 3);
    need_stage(c, J, "J");
    if (z_max_ < 0) throw std::invalid_argument("--z-max is required");
    const auto w = windowed_return_flow(c, grid_, j_, J, z_min_, z_max_, common_.threads);
    Report r = start("flow window", c.spec());
    r.summary["grid_inverse"] = grid_;
    r.summary["thickened_measure"] = q(thickened_base(c, grid_, j_).measure);
    r.summary["max"] = bound_json(w.max);
    r.add_column("z");
    r.add_column("lo", true);
    r.add_column("hi", true);
    if (geometric_) {
      r.add_column("thickened_lo", true);
      r.add_column("thickened_hi", true);
    }
    for (const auto& [z, v] : w.windows) {
      std::vector<std::string> row{std::to_string(z), q(v.lo()), q(v.hi())};
      if (geometric_) {
        const auto g = thickened_conditional(c, grid_, j_, J, z + grid_);
        row.push_back(q(g.lo()));
        row.push_back(q(g.hi()));
      }
      r.add_row(std::move(row));
    }
    return r;
  });
  window->add_option("--j", j_, "stage of E_j")->required();
  window->add_option("--J", J_, "resolution stage (default j+3)");
  window->add_option("--grid", grid_, "q = 1/t_j");
  window->add_option("--z-min", z_min_, "first window start");
  window->add_option("--z-max", z_max_, "last window start")->required();
  window->add_flag("--geometric", geometric_, "add mu(E1_j | T^{z+q} E_j) computed from set images");
}

}  // namespace

namespace {

const std::set<std::string> known_commands{
    "build",         "orbit",           "return-profile",   "correlate",          "blum-hanson", "joining blocks",
    "joining light", "joining di",      "joining disperse", "joining trivialize", "flow bands",  "flow window"};

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string flag_value(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + flag_value(v[i]);
    return out;
  }
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  throw std::invalid_argument("parameter values must be strings, integers, booleans or lists");
}

}  // namespace

Report Cli::run_config() {
  const fs::path config_path(config_);
  std::ifstream in(config_path);
  const auto cfg = nlohmann::json::parse(in);
  const fs::path base = config_path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  if (!cfg.contains("experiments") || !cfg["experiments"].is_array() || cfg["experiments"].empty())
    throw std::invalid_argument("config needs a nonempty \"experiments\" list");
  const std::string format = cfg.value("format", common_.format);
  parse_format(format);
  const bool decimal = cfg.value("decimal", common_.decimal);
  const fs::path out_dir = resolve(cfg.value("output_dir", std::string("out")));

  // Validate everything before running anything.
  struct Job {
    std::string name;
    std::vector<std::string> argv;
    fs::path output;
  };
  std::vector<Job> jobs;
  std::set<std::string> names;
  for (const auto& e : cfg["experiments"]) {
    const std::string name = e.at("name").get<std::string>();
    if (name.empty() || name.find_first_of("/\\ ") != std::string::npos)
      throw std::invalid_argument("experiment name '" + name + "' must be a nonempty plain file stem");
    if (!names.insert(name).second) throw std::invalid_argument("duplicate experiment name '" + name + "'");
    const std::string command = e.at("command").get<std::string>();
    if (!known_commands.count(command))
      throw std::invalid_argument("experiment '" + name + "': unknown command '" + command + "'");
    const fs::path spec = resolve(e.at("spec").get<std::string>());
    if (!fs::exists(spec)) throw std::invalid_argument("experiment '" + name + "': spec file " + spec.string() + " not found");

    Job job{name, words(command), out_dir / (name + (format == "json" ? ".json" : ".csv"))};
    job.argv.insert(job.argv.begin(), "rankone");
    job.argv.insert(job.argv.end(), {"--spec", spec.string()});
    const auto params = e.value("params", nlohmann::json::object());
    for (const auto& [key, v] : params.items()) {
      if (key == "spec" || key == "out" || key == "format")
        throw std::invalid_argument("experiment '" + name + "': '" + key + "' is set by the runner");
      if (v.is_boolean()) {
        if (v.get<bool>()) job.argv.push_back("--" + key);
        continue;
      }
      std::string value = flag_value(v);
      if (key == "second") {
        const auto path = resolve(value);
        if (!fs::exists(path)) throw std::invalid_argument("experiment '" + name + "': " + path.string() + " not found");
        value = path.string();
      }
      job.argv.insert(job.argv.end(), {"--" + key, value});
    }
    if (params.contains("z-min") && params.contains("z-max") && params["z-min"].is_number_integer() &&
        params["z-max"].is_number_integer() && params["z-min"].get<long>() > params["z-max"].get<long>())
      throw std::invalid_argument("experiment '" + name + "': empty z range");
    job.argv.insert(job.argv.end(), {"--format", format, "--out", job.output.string()});
    if (decimal) job.argv.push_back("--decimal");
    if (common_.threads > 1) job.argv.insert(job.argv.end(), {"--threads", std::to_string(common_.threads)});
    jobs.push_back(std::move(job));
  }

  Report r;
  r.command = "run";
  r.add_column("experiment");
  r.add_column("output");
  for (const auto& job : jobs) {
    std::vector<const char*> argv;
    for (const auto& a : job.argv) argv.push_back(a.c_str());
    Cli nested(out_, err_);
    const int rc = nested.run(static_cast<int>(argv.size()), argv.data());
    if (rc != Success) throw ExperimentFailed("experiment '" + job.name + "' failed", rc);
    r.add_row({job.name, job.output.string()});
  }
  return r;
}


int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    Cli cli(out, err);
    return cli.run(argc, argv);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return Internal;
  }
}

}  // namespace rankone::cli
