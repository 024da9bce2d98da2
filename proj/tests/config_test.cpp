#include <doctest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <sstream>

#include "scdiff/config.hpp"
#include "scdiff/errors.hpp"
#include "scdiff/evaluators.hpp"
#include "scdiff/export.hpp"
#include "scdiff/plot.hpp"
#include "scdiff/serialize.hpp"

using namespace scdiff;
using json = nlohmann::json;
namespace pt = boost::property_tree;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

pt::ptree parse_xml(const std::string& svg) {
  std::istringstream in(svg);
  pt::ptree tree;
  pt::read_xml(in, tree);
  return tree;
}

// Visits every element below `node`, depth first.
template <typename F>
void each_element(const pt::ptree& node, F&& f) {
  for (const auto& [k, child] : node) {
    if (k == "<xmlattr>") continue;
    f(k, child);
    each_element(child, f);
  }
}

json small_search_doc(std::uint64_t seed) {
  auto cfg = parse_run_config(R"({"evaluator": {"synthetic": "peak"},
      "stage1": {"n_init": 3, "n_iter": 2}, "stage2": {"iterations": 4, "n_runs": 2}})");
  apply_seed(cfg, seed);
  SyntheticEvaluator ev(Fixture::peak);
  return to_json(hierarchical_search(ev, cfg.vsml), cfg);
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = parse_run_config(R"({"evaluator": {"synthetic": "peak"}})");
  CHECK(c.evaluator.kind == EvaluatorSelection::Kind::synthetic);
  CHECK(c.window.kind == WindowKind::kaiser_bessel);
  CHECK(c.window.height == 64);
  CHECK(c.window.radius == 15.0);
  CHECK(c.window.beta == 7.0);
  CHECK(c.vsml.lambda == 1.0);
  CHECK(c.vsml.tau == 0.7);
  CHECK(c.vsml.stage1.lo == 1.5);
  CHECK(c.vsml.stage1.hi == 8.0);
  CHECK(c.vsml.stage1.n_init == 5);
  CHECK(c.vsml.stage1.n_iter == 10);
  CHECK(c.vsml.stage1.fixed_beta == 7.0);
  CHECK(c.vsml.stage2.beta0 == 8.0);
  CHECK(c.vsml.stage2.iterations == 50);
  CHECK(c.vsml.stage2.n_runs == 5);
  CHECK(c.vsml.request.radius == 15.0);
  CHECK(c.vsml.request.center.cx == 32.0);
  CHECK(c.vsml.request.center.cy == 32.0);
  CHECK(c.vsml.stage1.seed == 0);
}

TEST_CASE("explicit fields and seeds") {
  const auto c = parse_run_config(R"({
    "schema": "scdiff-config/1",
    "evaluator": {"external": ["scorer", "--fast"], "timeout_s": 12},
    "window": {"kind": "gaussian", "height": 32, "width": 48, "radius": 9, "eta": 0.4, "center": [10, 12]},
    "block": "mid", "prompt": "a red fox", "seed": 42,
    "vsml": {"lambda": 0.5, "tau": 0.6},
    "stage1": {"bounds": [2, 6], "n_init": 4, "n_iter": 6, "restarts": 3, "fixed_beta": 7.5},
    "stage2": {"beta0": 9, "bounds": [7, 11], "iterations": 20, "a": 0.3, "c": 0.05, "n_runs": 3, "max_backtracks": 4}
  })");
  CHECK(c.evaluator.argv == std::vector<std::string>{"scorer", "--fast"});
  CHECK(c.evaluator.timeout_s == 12.0);
  CHECK(c.window.kind == WindowKind::gaussian);
  CHECK(c.vsml.request.block == BlockTag::mid);
  CHECK(c.vsml.request.prompt == "a red fox");
  CHECK(c.vsml.request.center.cx == 10.0);
  CHECK(c.vsml.request.radius == 9.0);
  CHECK(c.seed == 42);
  CHECK(c.vsml.request.seed == 42);
  CHECK(c.vsml.stage1.seed == 42);
  CHECK(c.vsml.stage2.seed == (42 ^ 0x5bd1e9955bd1e995ULL));
  CHECK(c.vsml.stage2.beta_min == 7.0);
  CHECK(c.vsml.stage2.max_backtracks == 4);

  const auto shell = parse_run_config(R"({"evaluator": {"external": "python -m scorer"}})");
  CHECK(shell.evaluator.shell == "python -m scorer");
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak"}, "extra": 1})").find("/extra") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak", "x": 1}})").find("/evaluator/x") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak"}, "window": {"radus": 3}})").find("/window/radus") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak"}, "vsml": {"lam": 1}})").find("/vsml/lam") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak"}, "stage1": {"n": 1}})").find("/stage1/n") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak"}, "stage2": {"b": 1}})").find("/stage2/b") != std::string::npos);
}

TEST_CASE("invalid values name their path") {
  CHECK(error_of("{").find("not valid JSON") != std::string::npos);
  CHECK(error_of("[]").find("must be an object") != std::string::npos);
  CHECK(error_of("{}").find("/evaluator") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {}})").find("exactly one") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak", "external": "x"}})").find("exactly one") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "nope"}})").find("unknown fixture") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"external": []}})").find("/evaluator/external") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"external": [1]}})").find("/evaluator/external") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak", "timeout_s": 0}})").find("timeout_s") != std::string::npos);
  CHECK(error_of(R"({"schema": "v2", "evaluator": {"synthetic": "peak"}})").find("/schema") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak"}, "seed": -1})").find("/seed") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak"}, "seed": 1.5})").find("/seed") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak"}, "block": "up3"})").find("/block") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak"}, "vsml": {"tau": "high"}})").find("/vsml/tau") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak"}, "vsml": {"tau": 1.5}})").find("tau") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak"}, "window": {"kind": "hann"}})").find("/window/kind") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak"}, "window": {"radius": -2}})").find("/window") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak"}, "stage1": {"bounds": [1]}})").find("/stage1/bounds") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak"}, "stage1": {"n_init": 1}})").find("/stage1/n_init") != std::string::npos);
  CHECK(error_of(R"({"evaluator": {"synthetic": "peak"}, "stage2": {"beta0": 20}})").find("beta0") != std::string::npos);
}

TEST_CASE("config round trip") {
  const auto a = parse_run_config(R"({"evaluator": {"external": ["a", "b"]},
      "window": {"kind": "circular", "center": [3.5, 4]}, "seed": 7, "stage2": {"n_runs": 2}})");
  const auto j = to_json(a);
  const auto b = parse_run_config(j);
  CHECK(to_json(b) == j);
  CHECK(b.seed == 7);
  CHECK(b.window.center.has_value());
}

TEST_CASE("search documents validate and round trip") {
  const auto doc = small_search_doc(3);
  CHECK_NOTHROW(validate_search_document(doc));
  CHECK(doc["evaluator_calls"].get<std::size_t>() ==
        doc["budget"]["stage1"].get<std::size_t>() + doc["budget"]["stage2"].get<std::size_t>() + 1);
  const auto again = json::parse(dump(doc));
  CHECK(again == doc);
  CHECK(dump(small_search_doc(3)) == dump(doc));

  auto broken = doc;
  broken["schema"] = "other";
  CHECK_THROWS_AS(validate_search_document(broken), ConfigError);
  broken = doc;
  broken["result"].erase("alpha");
  CHECK_THROWS_AS(validate_search_document(broken), ConfigError);
  broken = doc;
  broken["stage2"]["runs"][0]["steps"][0]["beta_after"] = "x";
  CHECK_THROWS_AS(validate_search_document(broken), ConfigError);
  broken = doc;
  broken["config"]["stage1"]["nope"] = 1;
  CHECK_THROWS_AS(validate_search_document(broken), ConfigError);
}

TEST_CASE("search plot") {
  const auto doc = small_search_doc(1);
  const std::string svg = render_search_svg(doc);
  const auto tree = parse_xml(svg);
  const auto& root = tree.get_child("svg");
  const double width = root.get<double>("<xmlattr>.width");
  const double height = root.get<double>("<xmlattr>.height");

  std::size_t s1 = 0, s2 = 0, curves = 0;
  each_element(root, [&](const std::string& tag, const pt::ptree& el) {
    const auto cls = el.get<std::string>("<xmlattr>.class", "");
    if (tag == "circle") {
      const double cx = el.get<double>("<xmlattr>.cx");
      const double cy = el.get<double>("<xmlattr>.cy");
      CHECK(cx >= 0.0);
      CHECK(cx <= width);
      CHECK(cy >= 0.0);
      CHECK(cy <= height);
      if (cls == "stage1-point") ++s1;
      if (cls == "stage2-point") ++s2;
    }
    if (tag == "polyline" && cls == "posterior-mean") ++curves;
  });
  CHECK(s1 == doc["stage1"]["records"].size());
  std::size_t steps = 0;
  for (const auto& r : doc["stage2"]["runs"]) steps += r["steps"].size();
  CHECK(s2 == steps);
  CHECK(curves == 1);

  // A trace with no stages still renders both sets of axes.
  const json empty = {{"schema", kSearchSchema}, {"stage1", nullptr}, {"stage2", nullptr}};
  const auto bare = parse_xml(render_search_svg(empty));
  std::size_t axes = 0, circles = 0;
  each_element(bare.get_child("svg"), [&](const std::string& tag, const pt::ptree& el) {
    if (tag == "g" && el.get<std::string>("<xmlattr>.class", "") == "axes") ++axes;
    if (tag == "circle") ++circles;
  });
  CHECK(axes == 2);
  CHECK(circles == 0);

  CHECK_THROWS_AS(render_search_svg(json::array()), ConfigError);
  CHECK_THROWS_AS(render_search_svg(json{{"schema", "x"}}), ConfigError);
  auto bad = doc;
  bad["stage1"]["records"] = 5;
  CHECK_THROWS_AS(render_search_svg(bad), ConfigError);
  bad = doc;
  bad["stage2"]["runs"][0]["steps"][0]["beta_after"] = "high";
  CHECK_THROWS_AS(render_search_svg(bad), ConfigError);
}

TEST_CASE("line plot escapes labels") {
  const auto svg = render_lines_svg("a<b", "x", "y", {{"k&m", {{0, 1}, {1, 2}}}, {"flat", {}}});
  CHECK_NOTHROW(parse_xml(svg));
  CHECK(svg.find("a&lt;b") != std::string::npos);
  CHECK(svg.find("k&amp;m") != std::string::npos);
}

TEST_CASE("export formats") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);

  Grid g(2, 3, std::vector<double>{0, 0.5, 1, -1, 2, 0.25});
  std::ostringstream csv;
  write_grid_csv(csv, g);
  CHECK(csv.str() == "0,0.5,1\n-1,2,0.25\n");

  std::ostringstream pgm;
  write_pgm(pgm, g);
  CHECK(pgm.str() == "P2\n3 2\n255\n0 128 255\n0 255 64\n");

  std::ostringstream xy;
  write_xy_csv(xy, "r", "v", {{0, 1}, {0.05, -0.5}});
  CHECK(xy.str() == "r,v\n0,1\n0.050000000000000003,-0.5\n");
}
