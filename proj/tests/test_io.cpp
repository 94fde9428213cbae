#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "plap/boundary_data.hpp"
#include "plap/config.hpp"
#include "plap/report_io.hpp"
#include "plap/svg.hpp"

using namespace plap;

namespace {

void expect_config_error(const std::string& text, const std::string& needle) {
  try {
    parse_config(text);
    FAIL_CHECK("expected ConfigError containing '" << needle
                                                   << "', nothing thrown");
  } catch (const ConfigError& e) {
    CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos,
                  "message '" << e.what() << "' lacks '" << needle << "'");
  }
}

std::vector<std::string> split_csv_row(const std::string& line) {
  // Minimal RFC 4180 reader for the test: handles quoted fields with
  // embedded commas and doubled quotes.
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("config parsing: sections, comments, lists, booleans, defaults") {
  const std::string text = R"(
# full-line comment
; also a comment
[problem]
origin_x1 = -1.0
origin_x2 = -1.0
extent_x1 = 2
extent_x2 = 2
grids = 17, 33   # trailing comment
boundary = trig
boundary.amp = 0.5
boundary.kx = 2
p1 = 2
p2 = 4
eps = 1e-3
sigma = 0.0

[solver]
tol = 1e-10
max_iters = 40
continuation = 1e-1, 1e-2
ls_beta = 0.5
ls_c = 1e-4
seed = 7
random_init = no
cg_tol = 1e-7
cg_max_iters = 500
deterministic = yes

[disks]
center_x1 = 0.0
center_x2 = 0.0
R = 0.25
r_list = 0.1, 0.05

[checks]
enable = deriv_max_principle, energy_caccioppoli
monotonicity_threshold = 0.03
lebesgue_ratios = 2, 4
spread_limit = 8
cutoff_inner = 0.2
cutoff_outer = 0.45
synthetic.amp = 1 ; orphan parameter, removed for the happy-path parse

[sweep]
eps_list = 1e-2, 1e-3
sigma_list = 0.1, 0.01, 0

[output]
dir = results
write_field = false
write_svg = 1
)";
  // synthetic params without a synthetic id are rejected, so drop that line
  // for the happy path and keep it for the error case below.
  std::string happy = text;
  const auto pos = happy.find("synthetic.amp");
  happy.erase(pos, happy.find('\n', pos) - pos);

  const ExperimentConfig cfg = parse_config(happy);
  CHECK(cfg.problem.origin.x1 == -1.0);
  CHECK(cfg.problem.extent_x1 == 2.0);
  CHECK(cfg.problem.grids == std::vector<int>{17, 33});
  CHECK(cfg.problem.boundary == "trig");
  CHECK(cfg.problem.boundary_params.at("boundary.amp") == 0.5);
  CHECK(cfg.problem.p2 == 4.0);
  CHECK(cfg.solver.tol == 1e-10);
  CHECK(cfg.solver.max_iters == 40);
  CHECK(cfg.solver.continuation == std::vector<double>{1e-1, 1e-2});
  CHECK(cfg.solver.seed == 7);
  CHECK_FALSE(cfg.solver.random_init);
  CHECK(cfg.deterministic);
  CHECK(cfg.disks.center.x1 == 0.0);
  CHECK(cfg.disks.r_list == std::vector<double>{0.1, 0.05});
  CHECK(cfg.checks.enable ==
        std::vector<std::string>{"deriv_max_principle", "energy_caccioppoli"});
  CHECK(cfg.checks.monotonicity_threshold == 0.03);
  CHECK(cfg.checks.cutoff_outer == 0.45);
  CHECK(cfg.sweep.eps_list == std::vector<double>{1e-2, 1e-3});
  CHECK(cfg.sweep.sigma_list == std::vector<double>{0.1, 0.01, 0.0});
  CHECK(cfg.output.dir == "results");
  CHECK_FALSE(cfg.output.write_field);
  CHECK(cfg.output.write_svg);

  // Defaults when almost everything is omitted.
  const ExperimentConfig def = parse_config("[problem]\np1 = 2\np2 = 2\n");
  CHECK(def.problem.grids == std::vector<int>{65});
  CHECK(def.problem.boundary == "affine");
  CHECK(def.problem.eps == 1e-3);
  CHECK(def.checks.lebesgue_ratios == std::vector<double>{2.0, 4.0});
  CHECK(def.output.dir == "out");
  CHECK(def.threads == 1);
  CHECK_FALSE(def.deterministic);
}

TEST_CASE("config errors name the offending section and key") {
  expect_config_error("[problem]\nnope = 1\n", "[problem] nope");
  expect_config_error("[nosuch]\nx = 1\n", "unknown section");
  expect_config_error("[problem]\np1 = abc\n", "invalid number");
  expect_config_error("[problem]\ngrids = 33, 17\n",
                      "strictly increasing");
  expect_config_error("[problem]\ngrids = 2\n", "grids");
  expect_config_error("[problem]\nextent_x1 = 1\nextent_x2 = 0.3\n",
                      "spacing");
  expect_config_error("[problem]\np1 = 3\np2 = 2\n", "[problem] p1/p2");
  expect_config_error("[problem]\neps = -1\n", "[problem] eps");
  expect_config_error("[problem]\nboundary = mystery\n",
                      "[problem] boundary");
  expect_config_error("[problem]\nboundary.bogus = 1\n", "bogus");
  expect_config_error("[solver]\ntol = 0\n", "[solver] tol");
  expect_config_error("[solver]\nls_beta = 1.5\n", "[solver] ls_beta");
  expect_config_error("[solver]\ncontinuation = 1e-3, 1e-2\n",
                      "strictly decreasing");
  expect_config_error("[solver]\nrandom_init = maybe\n", "invalid boolean");
  expect_config_error("[disks]\nR = 0\n", "[disks] R");
  expect_config_error("[disks]\nR = 0.2\nr_list = 0.25\n",
                      "0 < r < R");
  expect_config_error("[checks]\nenable = warp_drive\n",
                      "unknown check id 'warp_drive'");
  expect_config_error("[checks]\nlebesgue_ratios = 0.5\n",
                      "ratios must be > 1");
  expect_config_error("[checks]\ncutoff_inner = 0.4\ncutoff_outer = 0.3\n",
                      "cutoff");
  expect_config_error("[checks]\nsynthetic = vortex\n",
                      "[checks] synthetic");
  expect_config_error("[checks]\nsynthetic.amp = 2\n", "synthetic");
  expect_config_error("[sweep]\neps_list = 1e-3, 1e-2\n",
                      "strictly decreasing");
  expect_config_error("[sweep]\neps_list = 1e-2, 1e-3\n"
                      "[checks]\neps_ref = 1e-2\n",
                      "eps_ref");
  expect_config_error("[output]\ndir =\n", "[output] dir");
  expect_config_error("[problem]\np1 = 2 = 3\n", "p1");
  expect_config_error("key_without_section = 1\n", "section");

  // Disk containment: everything the enabled checks reference must fit.
  expect_config_error(
      "[disks]\nR = 0.4\nr_list = 0.1\n"
      "[checks]\nenable = log_modulus_p\n",
      "leaves the domain");
}

TEST_CASE("check enablement follows applicability") {
  // Bump control scenario: probe radii whose Lebesgue reach (r * ratio)
  // would poke outside the unit square are fine as long as osc_lebesgue is
  // not among the enabled checks.
  const std::string base =
      "[problem]\np1 = 2\np2 = 4\n"
      "[disks]\nR = 0.2\nr_list = 0.1, 0.15\n"
      "[checks]\nsynthetic = bump\n";
  CHECK_NOTHROW(parse_config(base + "enable = deriv_max_principle\n"));
  expect_config_error(base + "enable = osc_lebesgue\n", "leaves the domain");

  // Explicitly enabling an inapplicable check names the reason.
  expect_config_error(
      "[problem]\np1 = 2\np2 = 4\n[checks]\nenable = log_modulus_p\n",
      "not applicable");
  expect_config_error(
      "[problem]\np1 = 3\np2 = 3\n"
      "[disks]\nr_list = 0.1\n[checks]\nenable = log_modulus_aniso\n",
      "not applicable");
  expect_config_error(
      "[problem]\np1 = 2\np2 = 4\n[checks]\nenable = eps_convergence\n",
      "not applicable");

  // Default enablement: all checks applicable to the configuration.
  const ExperimentConfig iso = parse_config(
      "[problem]\np1 = 3\np2 = 3\n"
      "[disks]\ncenter_x1 = 0.5\ncenter_x2 = 0.5\nR = 0.12\nr_list = 0.05\n");
  const auto ids = resolve_enabled_checks(iso);
  CHECK(std::find(ids.begin(), ids.end(), "log_modulus_p") != ids.end());
  CHECK(std::find(ids.begin(), ids.end(), "log_modulus_aniso") == ids.end());
  CHECK(std::find(ids.begin(), ids.end(), "p2_integrability") == ids.end());
  CHECK(std::find(ids.begin(), ids.end(), "eps_convergence") == ids.end());
  CHECK(std::find(ids.begin(), ids.end(), "energy_caccioppoli") != ids.end());

  const ExperimentConfig aniso = parse_config(
      "[problem]\np1 = 2\np2 = 4\n"
      "[disks]\ncenter_x1 = 0.5\ncenter_x2 = 0.5\nR = 0.12\nr_list = 0.05\n"
      "[sweep]\neps_list = 1e-2, 1e-3\n");
  const auto ids2 = resolve_enabled_checks(aniso);
  CHECK(std::find(ids2.begin(), ids2.end(), "log_modulus_aniso") !=
        ids2.end());
  CHECK(std::find(ids2.begin(), ids2.end(), "log_modulus_p") == ids2.end());
  CHECK(std::find(ids2.begin(), ids2.end(), "p2_integrability") != ids2.end());
  CHECK(std::find(ids2.begin(), ids2.end(), "eps_convergence") != ids2.end());

  // The known-id list drives report order and contains every id once.
  const auto& known = known_check_ids();
  CHECK(known.size() == 10);
  for (const std::string& id : ids2)
    CHECK(std::find(known.begin(), known.end(), id) != known.end());
}

TEST_CASE("load_config prefixes errors with the path") {
  try {
    load_config("/nonexistent/plap2d.cfg");
    FAIL_CHECK("expected ConfigError for a missing file");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/plap2d.cfg") !=
          std::string::npos);
  }
}

TEST_CASE("boundary data library") {
  const ExponentPair e24(2, 4);

  const BoundaryFn affine = make_boundary("affine", {}, e24);
  CHECK(affine({0.3, 0.4}) == doctest::Approx(0.7));  // defaults 0 + x1 + x2

  const BoundaryFn aff2 = make_boundary(
      "affine",
      {{"boundary.a0", 1.0}, {"boundary.a1", -2.0}, {"boundary.a2", 0.5}},
      e24);
  CHECK(aff2({0.5, 1.0}) == doctest::Approx(1.0 - 1.0 + 0.5));

  // Separable data agree with the closed-form solution object.
  const BoundaryFn sep =
      make_boundary("separable", {{"boundary.A", 0.5}}, e24);
  const SeparableSolution s = build_separable_solution(e24, 0.5);
  for (Point q : {Point{0.7, -0.3}, Point{-1.0, 1.0}, Point{0.0, 0.4}})
    CHECK(sep(q) == doctest::Approx(s.value(q)).epsilon(1e-13));

  const BoundaryFn corner = make_boundary("corner", {}, e24);
  CHECK(corner({0.5, -0.2}) == doctest::Approx(0.3));  // |x1| - |x2|

  const BoundaryFn trig = make_boundary(
      "trig", {{"boundary.amp", 2.0}, {"boundary.kx", 1.0},
               {"boundary.ky", 2.0}, {"boundary.a1", 0.25}},
      e24);
  const double pi = 3.14159265358979323846;
  const Point q{0.3, 0.6};
  CHECK(trig(q) == doctest::Approx(2.0 * std::cos(pi * q.x1) *
                                       std::cos(2 * pi * q.x2) +
                                   0.25 * q.x1));

  CHECK_THROWS_AS(make_boundary("mystery", {}, e24), std::invalid_argument);
  CHECK_THROWS_AS(make_boundary("affine", {{"boundary.bogus", 1.0}}, e24),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_boundary_params("trig", {{"boundary.freq", 1.0}}),
                  std::invalid_argument);
  CHECK_NOTHROW(validate_boundary_params("corner", {{"boundary.q", 1.5}}));
}

TEST_CASE("synthetic control fields") {
  const Grid g({0, 0}, 1.0, 1.0, 33, 33);
  const double pi = 3.14159265358979323846;

  const ScalarField w = make_synthetic_field(
      g, "wiggle", {{"synthetic.amp", 0.1}, {"synthetic.k", 8.0}});
  const Point q = g.node(5, 9);
  CHECK(w.at(5, 9) == doctest::Approx(0.1 * std::sin(8 * pi * q.x1) *
                                      std::sin(8 * pi * q.x2))
                          .epsilon(1e-12));

  const ScalarField b = make_synthetic_field(
      g, "bump", {{"synthetic.amp", 2.0}, {"synthetic.w", 0.2}});
  // Peak value at the domain center.
  CHECK(b.at(16, 16) == doctest::Approx(2.0).epsilon(1e-12));
  const Point p2 = g.node(20, 16);
  const double rho = std::hypot(p2.x1 - 0.5, p2.x2 - 0.5);
  CHECK(b.at(20, 16) ==
        doctest::Approx(2.0 * std::exp(-rho * rho / 0.04)).epsilon(1e-12));

  CHECK_THROWS_AS(make_synthetic_field(g, "vortex", {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      make_synthetic_field(g, "bump", {{"synthetic.radius", 0.1}}),
      std::invalid_argument);
}

TEST_CASE("diagnostics CSV: layout, quoting, and round-trip") {
  CheckParams p;
  p.r = 0.1;
  p.R = 0.2;
  p.center = {0.5, 0.25};
  p.p1 = 2;
  p.p2 = 4;
  p.eps = 1e-3;
  p.h = 1.0 / 64;
  p.axis = 2;
  DiagnosticReport a =
      make_report("osc_lebesgue", 1.0 / 3.0, 2.0 / 3.0, 0.05, p);
  DiagnosticReport b = make_report("deriv_max_principle", 1e-17, 0.0, 0.0, p,
                                   "note with, comma and \"quotes\"");

  const std::string csv = diagnostics_csv({a, b});
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line ==
        "name,p1,p2,eps,sigma,h,axis,center_x1,center_x2,r,R,lhs,rhs,ratio,"
        "slack,pass,note");

  REQUIRE(std::getline(in, line));
  auto row = split_csv_row(line);
  REQUIRE(row.size() == 17);
  CHECK(row[0] == "osc_lebesgue");
  CHECK(std::strtod(row[11].c_str(), nullptr) == 1.0 / 3.0);  // %.17g exact
  CHECK(std::strtod(row[12].c_str(), nullptr) == 2.0 / 3.0);
  CHECK(row[15] == "1");

  REQUIRE(std::getline(in, line));
  row = split_csv_row(line);
  REQUIRE(row.size() == 17);
  CHECK(row[16] == "note with, comma and \"quotes\"");
  CHECK(row[15] == "0");
  CHECK(std::strtod(row[11].c_str(), nullptr) == 1e-17);

  CHECK_FALSE(all_pass({a, b}));
  CHECK(all_pass({a}));
}

TEST_CASE("diagnostics JSON parses and mirrors the rows") {
  CheckParams p;
  p.p1 = 2;
  p.p2 = 3;
  p.h = 0.125;
  DiagnosticReport a = make_report("energy_caccioppoli", 0.5, 2.0, 0.0, p,
                                   "a_ref=72");
  const std::string js = diagnostics_json({a});
  const auto doc = nlohmann::json::parse(js);
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["all_pass"] == true);
  REQUIRE(doc["reports"].size() == 1);
  const auto& r = doc["reports"][0];
  CHECK(r["name"] == "energy_caccioppoli");
  CHECK(r["lhs"] == 0.5);
  CHECK(r["rhs"] == 2.0);
  CHECK(r["ratio"] == 0.25);
  CHECK(r["pass"] == true);
  CHECK(r["note"] == "a_ref=72");
  CHECK(r["p2"] == 3.0);
}

TEST_CASE("tabular CSV emitters") {
  EpsConvergenceRow e;
  e.eps = 1e-2;
  e.lhs = 1e-4;
  e.rhs = 5e-3;
  e.ratio = 0.02;
  const std::string ecsv = eps_table_csv({e});
  CHECK(ecsv.find("eps,lhs,rhs,ratio") == 0);
  CHECK(ecsv.find("0.02") != std::string::npos);

  SigmaComparisonRow s;
  s.sigma = 0.1;
  s.energy_min = 1.25;
  s.energy_at_ueps = 1.25 + 1e-9;
  s.max_gap = 3e-4;
  s.minimality = true;
  const std::string scsv = sigma_table_csv({s});
  CHECK(scsv.find("sigma,energy_min,energy_at_ueps,max_gap,minimality") == 0);
  CHECK(scsv.find("1") != std::string::npos);

  MmsRow m1{17, 0.125, 1e-2, 0.0};
  MmsRow m2{33, 0.0625, 4e-3, 1.32};
  const std::string mcsv = mms_table_csv({m1, m2});
  CHECK(mcsv.find("nx,h,max_interior_error,rate") == 0);
  CHECK(mcsv.find("33") != std::string::npos);
  CHECK(mcsv.find("1.32") != std::string::npos);
}

TEST_CASE("atomic file writes create parents and leave no temporaries") {
  namespace fs = std::filesystem;
  const fs::path root =
      fs::temp_directory_path() / ("plap_io_test_" + std::to_string(::rand()));
  const fs::path target = root / "nested" / "dir" / "report.csv";

  write_file_atomic(target.string(), "alpha,beta\n1,2\n");
  {
    std::ifstream in(target);
    REQUIRE(in.good());
    std::string all((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    CHECK(all == "alpha,beta\n1,2\n");
  }

  // Overwrite must replace the content, still atomically.
  write_file_atomic(target.string(), "gamma\n");
  {
    std::ifstream in(target);
    std::string all((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    CHECK(all == "gamma\n");
  }

  // Only the target remains; no .tmp droppings.
  int entries = 0;
  for (const auto& ent : fs::directory_iterator(target.parent_path())) {
    ++entries;
    CHECK(ent.path().filename() == "report.csv");
  }
  CHECK(entries == 1);
  fs::remove_all(root);
}

TEST_CASE("SVG line plots are self-contained and deterministic") {
  SvgSeries s1{"measured", {1.0, 2.0, 3.0}, {0.5, 0.25, 0.125}};
  SvgSeries s2{"bound", {1.0, 2.0, 3.0}, {1.0, 0.8, 0.6}};
  SvgAxes axes{"radius", "ratio", false, true};

  const std::string svg = line_plot_svg("decay", axes, {s1, s2});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("measured") != std::string::npos);
  CHECK(svg.find("bound") != std::string::npos);
  CHECK(svg.find("decay") != std::string::npos);
  CHECK(svg.find("radius") != std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);
  CHECK(svg.find("inf") == std::string::npos);

  CHECK(line_plot_svg("decay", axes, {s1, s2}) == svg);  // deterministic

  // Log axes drop nonpositive samples instead of emitting garbage.
  SvgSeries withzero{"z", {0.0, 1.0, 2.0}, {1.0, 1.0, 1.0}};
  SvgAxes logx{"x", "y", true, false};
  const std::string svg2 = line_plot_svg("t", logx, {withzero});
  CHECK(svg2.find("nan") == std::string::npos);
  CHECK(svg2.rfind("<svg", 0) == 0);

  // Labels are XML-escaped.
  SvgSeries esc{"a<b&c", {1.0}, {1.0}};
  const std::string svg3 = line_plot_svg("t", axes, {esc});
  CHECK(svg3.find("a<b&c") == std::string::npos);
  CHECK(svg3.find("a&lt;b&amp;c") != std::string::npos);
}
