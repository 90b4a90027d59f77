#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "winter/cli.hpp"
#include "winter/errors.hpp"
#include "winter/io.hpp"
#include "winter/spectrum.hpp"

namespace fs = std::filesystem;
using winter::kPi;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("winter_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = winter::cli::run(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

std::string first_line(const fs::path& p) {
  std::ifstream is(p);
  std::string line;
  std::getline(is, line);
  return line;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("grid specs") {
    using winter::parse_grid;
    CHECK(parse_grid("2.5") == std::vector<double>{2.5});
    CHECK(parse_grid("1,2,4") == std::vector<double>{1, 2, 4});
    const auto lin = parse_grid("0:pi:5");
    REQUIRE(lin.size() == 5);
    CHECK(lin[2] == doctest::Approx(kPi / 2));
    CHECK(lin.back() == kPi);
    CHECK(parse_grid("0:0.9*pi:3").back() == 0.9 * kPi);
    const auto lg = parse_grid("logspace:1e3:1e5:3");
    CHECK(lg[1] == doctest::Approx(1e4));
    CHECK(lg.back() == 1e5);
    for (const char* bad : {"", "a", "1:2", "2,1", "0:1:0", "logspace:0:1:3", "1:2:3:4", "1,,2"})
      CHECK_THROWS_AS(parse_grid(bad), winter::DomainError);
  }

  TEST_CASE("crossing search") {
    const std::vector<double> t = {0.0, 1.0, 2.0, 3.0, 4.0};
    const auto c = winter::cli::find_crossings([](double s) { return (s - 1.25) * (s - 3.5); }, t, 1e-12);
    REQUIRE(c.size() == 2);
    CHECK(c[0].t == doctest::Approx(1.25).epsilon(1e-10));
    CHECK(c[0].direction == -1);
    CHECK(c[1].t == doctest::Approx(3.5).epsilon(1e-10));
    CHECK(c[1].direction == 1);
    CHECK(c[0].lo <= c[0].t);
    CHECK(c[0].hi >= c[0].t);
    CHECK(winter::cli::find_crossings([](double) { return 0.0; }, t).empty());
  }

  TEST_CASE("poles command") {
    const fs::path dir = scratch("poles");
    REQUIRE(run({"poles", "--g", "0.1", "--n-max", "5", "--out", dir.string()}) == 0);
    CHECK(first_line(dir / "poles.csv") ==
          "n,re_k,im_k,omega,gamma,residual,seed_re,seed_im,omega_pert1,omega_pert2,gamma_pert2,gamma_pert3");
    const auto j = nlohmann::json::parse(slurp(dir / "poles.json"));
    REQUIRE(j["poles"].size() == 5);
    for (const auto& p : j["poles"]) CHECK(p["residual"].get<double>() < 1e-12);
    const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(m["command"] == "poles");
    CHECK(m["tool"] == "winter 0.3.0");
    CHECK(m["outputs"] == nlohmann::json::array({"poles.json", "poles.csv"}));
  }

  TEST_CASE("small coupling pole columns") {
    const fs::path dir = scratch("poles_small");
    REQUIRE(run({"poles", "--g", "0.01", "--n-max", "10", "--out", dir.string()}) == 0);
    std::ifstream is(dir / "poles.csv");
    std::string line;
    std::getline(is, line);
    int rows = 0;
    while (std::getline(is, line)) {
      std::stringstream ss(line);
      std::string n, re;
      std::getline(ss, n, ',');
      std::getline(ss, re, ',');
      CHECK(std::stod(re) == doctest::Approx(std::stoi(n) * 0.99).epsilon(2e-3));
      ++rows;
    }
    CHECK(rows == 10);
  }

  TEST_CASE("exit codes") {
    std::string err;
    CHECK(run({"poles", "--g", "0", "--out", scratch("e1").string()}, &err) == 1);
    CHECK(err.find("--g") != std::string::npos);
    CHECK(run({"poles"}) == 1);
    CHECK(run({"frobnicate"}) == 1);
    CHECK(run({"--version"}) == 0);
    // The n = 1 pole leaves the last octant long before g = 50.
    CHECK(run({"poles", "--g", "50", "--n-max", "2", "--out", scratch("e2").string()}) == 2);
    CHECK(run({"evolve", "--g", "0.2", "--method", "direct", "--tol", "1e-17", "--t", "1", "--out",
               scratch("e3").string()}) == 3);
    CHECK(run({"mixing", "--g", "1e9", "--n", "7", "--order", "1", "--emit", "Uinv", "--out", scratch("e4").string()}) == 4);
    const fs::path e5 = scratch("e5");
    CHECK(run({"crossings", "--g", "0.1", "--l", "2", "--curves", "diagonal,pole:5", "--t", "1:10:10", "--out",
               e5.string()}) == 5);
    // The manifest precedes the computation, so it exists even on failure.
    CHECK(fs::exists(e5 / "manifest.json"));
  }

  TEST_CASE("evolve outputs and warnings") {
    const fs::path dir = scratch("evolve");
    std::string err;
    REQUIRE(run({"evolve", "--g", "0.1", "--l", "2", "--method", "exponential", "--t", "0", "--out", dir.string()},
                &err) == 0);
    CHECK(err.find("does not reproduce the t = 0 state") != std::string::npos);
    CHECK(first_line(dir / "evolve.csv") == "t,exponential");
    REQUIRE(run({"evolve", "--g", "0.1", "--l", "2", "--parts", "fig3", "--t", "1:20:3", "--out", dir.string()}) == 0);
    CHECK(first_line(dir / "evolve.csv") == "t,diagonal_pole,offdiagonal_pole,power");
    REQUIRE(run({"evolve", "--g", "0.2", "--parts", "split", "--t", "0,5", "--out", dir.string()}, &err) == 0);
    CHECK(first_line(dir / "evolve.csv") == "t,exponential,power");
    CHECK(slurp(dir / "evolve.csv").find(",nan\n") != std::string::npos);
    REQUIRE(run({"evolve", "--g", "0.2", "--method", "power", "--t", "2,3", "--x", "0:pi:33", "--emit", "fields", "--out",
                 dir.string()}) == 0);
    CHECK(first_line(dir / "field_power_1.csv") == "x,re,im");
    REQUIRE(run({"evolve", "--g", "0.2", "--method", "power", "--t", "2", "--format", "json", "--out", dir.string()}) == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "evolve.json"))["power"].size() == 1);
    CHECK(run({"evolve", "--g", "0.2", "--method", "sideways", "--t", "1", "--out", dir.string()}) == 1);
  }

  TEST_CASE("mixing outputs") {
    const fs::path dir = scratch("mixing");
    REQUIRE(run({"mixing", "--g", "0.1", "--n", "64", "--emit", "U,Uinv", "--order", "2", "--out", dir.string()}) == 0);
    CHECK(first_line(dir / "U.csv") == "row,col,re,im");
    const auto s = nlohmann::json::parse(slurp(dir / "mixing.json"));
    CHECK(s["inverse"]["residual"].get<double>() < 1e-10);
    REQUIRE(run({"mixing", "--g", "0.1", "--rotate", "1", "--order", "1", "--out", dir.string()}) == 0);
    const auto r = nlohmann::json::parse(slurp(dir / "mixing.json"));
    CHECK(r["rotate"]["closed_form_max_deviation"].get<double>() < 5 * 0.01);
    REQUIRE(run({"mixing", "--g", "0", "--rotate", "3", "--out", dir.string()}) == 0);
    CHECK(slurp(dir / "rotated_l3.csv").find("3,1,0\n") != std::string::npos);
    CHECK(run({"mixing", "--g", "0.1", "--emit", "Q", "--out", dir.string()}) == 1);
  }

  TEST_CASE("crossings command") {
    const fs::path dir = scratch("crossings");
    REQUIRE(run({"crossings", "--g", "0.1", "--l", "2", "--curves", "offdiagonal,diagonal", "--t", "0.5:50:100", "--out",
                 dir.string()}) == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "crossings.json"));
    REQUIRE(j["crossings"].size() == 1);
    CHECK(j["crossings"][0]["t"].get<double>() == doctest::Approx(4.58).epsilon(0.01));
    CHECK(j["crossings"][0]["bracket"].size() == 2);
  }

  TEST_CASE("rerun reproduces outputs byte for byte") {
    const std::vector<std::vector<std::string>> commands = {
        {"poles", "--g", "0.3", "--n-max", "6"},
        {"evolve", "--g", "0.2", "--method", "all", "--t", "1,4", "--x", "0:pi:65"},
        {"evolve", "--g", "0.2", "--parts", "split", "--model", "exact", "--t", "1:30:4"},
        {"mixing", "--g", "0.05", "--n", "16", "--emit", "A,V,Uinv,gap,contamination", "--t", "1,2", "--rotate", "2"},
        {"crossings", "--g", "0.2", "--t", "1:100:50"},
    };
    int i = 0;
    for (auto args : commands) {
      const fs::path first = scratch("rerun_a" + std::to_string(i));
      const fs::path second = scratch("rerun_b" + std::to_string(i));
      ++i;
      args.push_back("--out");
      args.push_back(first.string());
      REQUIRE(run(args) == 0);
      REQUIRE(run({"rerun", (first / "manifest.json").string(), "--out", second.string()}) == 0);
      const auto m = nlohmann::json::parse(slurp(first / "manifest.json"));
      CHECK(slurp(first / "manifest.json") == slurp(second / "manifest.json"));
      for (const auto& name : m["outputs"]) {
        const std::string f = name.get<std::string>();
        REQUIRE(fs::exists(first / f));
        CHECK(slurp(first / f) == slurp(second / f));
      }
    }
  }

  TEST_CASE("atomic writes leave no temporaries") {
    const fs::path dir = scratch("atomic");
    fs::create_directories(dir);
    winter::write_atomic(dir / "a.txt", "hello\n");
    CHECK(slurp(dir / "a.txt") == "hello\n");
    CHECK_FALSE(fs::exists(dir / "a.txt.tmp"));
  }

  TEST_CASE("parallel_for propagates the first failure") {
    std::vector<int> hit(100, 0);
    winter::parallel_for(hit.size(), [&](std::size_t i) { hit[i] = 1; });
    for (int h : hit) CHECK(h == 1);
    CHECK_THROWS_AS(winter::parallel_for(10, [](std::size_t i) {
                      if (i == 3) throw winter::SearchError("boom");
                    }),
                    winter::SearchError);
  }
}
