#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

#include "bubbleband/cli.hpp"

using namespace bubbleband;
namespace fs = std::filesystem;

namespace {

int exit_code(const std::string& args) {
  const std::string cmd = std::string(BUBBLEBAND_EXE) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

RunConfig small_bands() {
  RunConfig c;
  c.radius = 0.25;
  c.rho = c.kappa = 1000;
  c.truncation_N = 3;
  c.path_resolution = 3;
  return c;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config parsing") {
    const auto c = parse_config(R"({"radius": 0.25, "truncation_N": 3, "contrasts": [10, 20], "output_path": "x.csv"})");
    CHECK(c.radius == 0.25);
    CHECK(c.truncation_N == 3);
    CHECK(c.contrasts == std::vector<double>{10, 20});
    CHECK(c.output_path == "x.csv");
    CHECK(c.rho == 5000.0);
    CHECK_THROWS_AS(parse_config(R"({"radius": 0.25, "radious": 1})"), UsageError);
    CHECK_THROWS_AS(parse_config(R"({"radius": "big"})"), UsageError);
    CHECK_THROWS_AS(parse_config("[1, 2]"), UsageError);
    CHECK_THROWS_AS(parse_config("{"), UsageError);
    CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), UsageError);
  }

  TEST_CASE("config validation") {
    RunConfig c;
    CHECK_NOTHROW(validate(c));
    c.radius = 0.5;
    CHECK_THROWS_AS(validate(c), UsageError);
    c = {};
    c.truncation_N = 13;
    CHECK_THROWS_AS(validate(c), UsageError);
    c = {};
    c.kappa_b = -1;
    CHECK_THROWS_AS(validate(c), UsageError);
    c = {};
    c.path_resolution = 2;
    CHECK_THROWS_AS(validate(c), UsageError);
    c = {};
    c.contrasts = {100, 0};
    CHECK_THROWS_AS(validate(c), UsageError);
  }

  TEST_CASE("alpha parsing") {
    const auto m = parse_alpha("pi,pi");
    CHECK(m == phonon::points::M);
    const auto a = parse_alpha("pi/2, -2*pi/3");
    CHECK(a.x == doctest::Approx(phonon::pi / 2));
    CHECK(a.y == doctest::Approx(-2 * phonon::pi / 3));
    const auto b = parse_alpha("0.5,-1e-2");
    CHECK(b.x == 0.5);
    CHECK(b.y == -0.01);
    CHECK(parse_alpha("-pi,0").x == -phonon::pi);
    CHECK_THROWS_AS(parse_alpha("1"), UsageError);
    CHECK_THROWS_AS(parse_alpha("1,2,3"), UsageError);
    CHECK_THROWS_AS(parse_alpha("x,1"), UsageError);
    CHECK_THROWS_AS(parse_alpha("pi/0,1"), UsageError);
  }

  TEST_CASE("capacity report") {
    std::ostringstream out, err;
    CHECK(run_capacity(RunConfig{}, phonon::points::M, out, err) == 0);
    std::map<std::string, double> kv;
    for (const auto& l : lines(out.str())) {
      if (l.empty() || l[0] == '#') continue;
      const auto eq = l.find('=');
      kv[l.substr(0, eq)] = std::stod(l.substr(eq + 1));
    }
    CHECK(kv.at("Cap_D") == doctest::Approx(2.0974).epsilon(1e-4));
    CHECK(kv.at("Cap_D_alpha") == doctest::Approx(2.64182920077).epsilon(1e-9));
    CHECK(kv.at("omega_M") == doctest::Approx(0.2311).epsilon(1e-3));
    CHECK(kv.at("ratio") == doctest::Approx(kv.at("Cap_D_alpha") / kv.at("Cap_D")).epsilon(1e-13));
    CHECK(kv.at("omega_M_alpha") == doctest::Approx(kv.at("omega_M") * std::sqrt(kv.at("ratio"))).epsilon(1e-13));
    CHECK_THROWS_AS(run_capacity(RunConfig{}, phonon::points::Gamma, out, err), UsageError);
  }

  TEST_CASE("bands output schema and determinism") {
    std::ostringstream a, b, err;
    REQUIRE(run_bands(small_bands(), 1, a, err) == 0);
    REQUIRE(run_bands(small_bands(), 2, b, err) == 0);
    CHECK(a.str() == b.str());
    CHECK(a.str().find('\r') == std::string::npos);
    const auto l = lines(a.str());
    REQUIRE(l.size() == 1 + 10 * 2 + 3);
    CHECK(l[0] == "s,alpha_x,alpha_y,band,omega");
    CHECK(l[1] == "0,0,0,1,0");
    CHECK(l[l.size() - 3].rfind("# omega_star=", 0) == 0);
    CHECK(l[l.size() - 2].rfind("# gap_lo=", 0) == 0);
    CHECK(l[l.size() - 1].rfind("# gap_hi=", 0) == 0);
    // at least 12 significant digits in every frequency
    const std::string w = l[4].substr(l[4].rfind(',') + 1);
    CHECK(w.size() >= 13);
  }

  TEST_CASE("compare output") {
    RunConfig c;
    c.radius = 0.0125;
    c.truncation_N = 3;
    c.contrasts = {1000};
    std::ostringstream out, err;
    REQUIRE(run_compare(c, std::nullopt, 1, out, err) == 0);
    const auto l = lines(out.str());
    REQUIRE(l.size() == 2);
    CHECK(l[0] == "contrast,delta,omega_exact,omega_approx,rel_error");
    double vals[5];
    std::istringstream row(l[1]);
    for (double& v : vals) {
      std::string f;
      std::getline(row, f, ',');
      v = std::stod(f);
    }
    CHECK(vals[1] == doctest::Approx(1e-3));
    CHECK(vals[4] > 0.0);
    CHECK(vals[4] == doctest::Approx(std::abs(vals[2] - vals[3]) / vals[2]));
    CHECK_THROWS_AS(run_compare(c, phonon::points::Gamma, 1, out, err), UsageError);
  }

  TEST_CASE("compare failures stay in the table") {
    RunConfig c;
    c.radius = 0.0125;
    c.truncation_N = 2;
    c.contrasts = {1000, 3000};
    c.lattice_tol = 1e-30;  // unreachable, every lattice sum refuses
    std::ostringstream out, err;
    CHECK(run_compare(c, std::nullopt, 1, out, err) == 1);
    const auto l = lines(out.str());
    REQUIRE(l.size() >= 5);
    CHECK(l[1].rfind("1000,0.001,,", 0) == 0);
    CHECK(l[1].back() == ',');
    CHECK(l[3] == "# warnings");
    CHECK(l[4].rfind("# contrast=1000:", 0) == 0);
  }

  TEST_CASE("dilute output") {
    RunConfig c;
    c.rho = c.kappa = 1000;
    c.truncation_N = 2;
    c.path_resolution = 3;
    c.omega_max = 1.0;
    c.radii = {0.25};
    std::ostringstream out, err;
    REQUIRE(run_dilute(c, 1, out, err) == 0);
    const auto l = lines(out.str());
    REQUIRE(l.size() == 3);
    CHECK(l[0] == "radius,omega_star,omega_M,ratio");
    CHECK(l[1].rfind("0.25,", 0) == 0);
    CHECK(l[2].rfind("# argmax radius=0.25", 0) == 0);
    // the omega_M column is the Minnaert formula with the disk capacity
    const double wm = std::sqrt(1e-3 * (-2 * phonon::pi / std::log(0.25)) / (phonon::pi * 0.0625));
    const auto f1 = l[1].find(',', 5), f2 = l[1].find(',', f1 + 1);
    CHECK(std::stod(l[1].substr(f1 + 1, f2 - f1 - 1)) == doctest::Approx(wm).epsilon(1e-13));
  }

  TEST_CASE("exit codes") {
    CHECK(exit_code("--help") == 0);
    CHECK(exit_code("") == 2);
    CHECK(exit_code("frobnicate") == 2);
    CHECK(exit_code("capacity --alpha 0,0") == 2);
    CHECK(exit_code("capacity --alpha pi") == 2);
    CHECK(exit_code("bands --threads 0") == 2);
    CHECK(exit_code("bands --config /nonexistent.json") == 2);
    CHECK(exit_code("capacity --alpha pi,pi") == 0);

    const fs::path dir = fs::temp_directory_path() / "bubbleband_cli_test";
    fs::create_directories(dir);
    {
      std::ofstream(dir / "bad.json") << R"({"radius": 0.3, "unknown": 1})";
      std::ofstream(dir / "fail.json") << R"({"radius": 0.0125, "truncation_N": 2, "contrasts": [1000], "lattice_tol": 1e-30})";
    }
    CHECK(exit_code("bands --config " + (dir / "bad.json").string()) == 2);
    CHECK(exit_code("compare --config " + (dir / "fail.json").string() + " --output " + (dir / "f.csv").string()) == 1);
    CHECK(fs::exists(dir / "f.csv"));
    CHECK(exit_code("capacity --alpha pi,0 --output " + (dir / "cap.txt").string()) == 0);
    std::ifstream cap(dir / "cap.txt");
    std::string all((std::istreambuf_iterator<char>(cap)), {});
    CHECK(all.find("Cap_D_alpha=") != std::string::npos);
    fs::remove_all(dir);
  }

  TEST_CASE("help documents the schemas") {
    const std::string tmp = (fs::temp_directory_path() / "bubbleband_help.txt").string();
    REQUIRE(std::system((std::string(BUBBLEBAND_EXE) + " --help > " + tmp).c_str()) == 0);
    std::ifstream in(tmp);
    std::string h((std::istreambuf_iterator<char>(in)), {});
    for (const char* s : {"s,alpha_x,alpha_y,band,omega", "contrast,delta,omega_exact,omega_approx,rel_error",
                          "radius,omega_star,omega_M,ratio", "Cap_D_alpha", "--config", "--alpha", "--output",
                          "--threads", "bands", "compare", "dilute", "capacity"})
      CHECK_MESSAGE(h.find(s) != std::string::npos, s);
    fs::remove(tmp);
  }
}
