#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sqm/numeric.hpp"
#include "sqm/random_systems.hpp"
#include "sqm/report.hpp"

using namespace sqm;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("format_float round-trips doubles") {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, 30.0 * (rng.uniform() - 0.5));
    CHECK(std::stod(format_float(v)) == v);
  }
  CHECK(std::stod(format_float(M_PI)) == M_PI);
}

TEST_CASE("CSV writing, parsing and precision") {
  CsvTable t;
  t.header = {"k", "coeff", "energy"};
  Rng rng(11);
  for (int k = 0; k < 50; ++k) {
    const double c = rng.gaussian();
    t.rows.push_back({std::to_string(k), format_float(c), format_float(c * c)});
  }
  const std::string bytes = csv_to_string(t);
  std::istringstream in(bytes);
  const CsvTable back = csv_parse(in);
  REQUIRE(back.header == t.header);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(std::stod(back.rows[i][1]) == std::stod(t.rows[i][1]));
    CHECK(std::stod(back.rows[i][2]) == std::stod(t.rows[i][2]));
  }
  SUBCASE("empty results are rejected") {
    CsvTable empty;
    empty.header = {"a"};
    const auto file = std::filesystem::temp_directory_path() / "sqm_empty.csv";
    CHECK_THROWS_AS(write_csv(file, empty), std::invalid_argument);
  }
  SUBCASE("ragged rows are rejected") {
    CsvTable ragged;
    ragged.header = {"a", "b"};
    ragged.rows.push_back({"1"});
    CHECK_THROWS_AS(csv_to_string(ragged), std::invalid_argument);
  }
}

TEST_CASE("artifact writes are byte-identical across runs") {
  const auto dir = std::filesystem::temp_directory_path();
  CsvTable t;
  t.header = {"n", "value"};
  for (int i = 0; i < 20; ++i)
    t.rows.push_back({std::to_string(i), format_float(std::sqrt(double(i)))});
  const auto f1 = dir / "sqm_det_1.csv";
  const auto f2 = dir / "sqm_det_2.csv";
  write_csv(f1, t);
  write_csv(f2, t);
  CHECK(slurp(f1) == slurp(f2));

  ordered_json j;
  j["alpha"] = 0.1 + 0.2;
  j["values"] = std::vector<double>{1.0 / 3.0, M_PI};
  const auto g1 = dir / "sqm_det_1.json";
  const auto g2 = dir / "sqm_det_2.json";
  write_json(g1, j);
  write_json(g2, j);
  CHECK(slurp(g1) == slurp(g2));
  // shortest-round-trip doubles survive the parse
  const ordered_json back = ordered_json::parse(slurp(g1));
  CHECK(back.at("alpha").get<double>() == 0.1 + 0.2);
}

TEST_CASE("path JSON round-trip is exact") {
  const Path p = make_brownian(2.0, 512, 99, 1.5);
  const Path back = path_from_json(path_to_json(p));
  CHECK(back.T == p.T);
  CHECK(back.grid == p.grid);
  CHECK(back.values == p.values);
  CHECK(back.kind == p.kind);
  CHECK(back.seed == p.seed);
  SUBCASE("invariant violations are rejected on load") {
    ordered_json j = path_to_json(p);
    j["values"][0] = 0.5;
    CHECK_THROWS_AS(path_from_json(j), std::invalid_argument);
  }
}

TEST_CASE("system JSON round-trip") {
  Rng rng(3);
  SUBCASE("plain Gaussian mixture") {
    const MixtureSystem f = random_mixture(rng, 3, 2);
    const MixtureSystem back = system_from_json(system_to_json(f));
    CHECK(hellinger_distance(back, f) < 1e-12);
    CHECK(back.level() == f.level());
  }
  SUBCASE("extended factors: poly, modulation, grid, tail mass") {
    MixtureSystem f;
    ProductSystem s;
    GaussFactor g = GaussFactor::plain(0.3, 0.8, 1.0);
    g.modulation = 0.4;
    g.poly.coef = {cxd(1.0, 0.2), cxd(0.0, -0.5)};
    s.factors.push_back(g);
    GridFactor gr;
    gr.x0 = -2.0;
    gr.dx = 0.5;
    gr.values = {cxd(0, 0), cxd(1, 0.25), cxd(0.5, 0), cxd(0, 0), cxd(0, 0),
                 cxd(0, 0), cxd(0, 0), cxd(0, 0), cxd(0, 0)};
    s.factors.push_back(gr);
    s.tail_mass = 0.9;
    f.terms.push_back({cxd(0.7, -0.1), s});
    const MixtureSystem back = system_from_json(system_to_json(f));
    REQUIRE(back.terms.size() == 1);
    CHECK(back.terms[0].system.tail_mass == 0.9);
    const auto& gb = std::get<GaussFactor>(back.terms[0].system.factors[0]);
    CHECK(gb.modulation == g.modulation);
    CHECK(gb.poly.coef == g.poly.coef);
    const auto& grb = std::get<GridFactor>(back.terms[0].system.factors[1]);
    CHECK(grb.values == gr.values);
  }
}

TEST_CASE("ensemble JSON round-trip") {
  PathEnsemble e;
  e.paths.push_back(make_brownian(1.0, 128, 1));
  e.paths.push_back(make_linear(1.0, 64, 0.5));
  e.weights = {0.25, 0.75};
  const PathEnsemble back = ensemble_from_json(ensemble_to_json(e));
  REQUIRE(back.paths.size() == 2);
  CHECK(back.weights == e.weights);
  CHECK(back.paths[0].values == e.paths[0].values);
  CHECK(back.paths[1].values == e.paths[1].values);
}
