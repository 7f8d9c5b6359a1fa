#include <cstdio>
#include <random>
#include <string>

#include "doctest.h"
#include "etm/config.hpp"
#include "etm/errors.hpp"

using namespace etm;

TEST_CASE("key = value parsing with comments and dotted keys") {
  const auto cfg = Config::from_text(
      "# header comment\n"
      "model.hazard = satquad   # trailing comment\n"
      "model.b=0.43\n"
      "\n"
      "  run.T  =  100.0  \n");
  CHECK(cfg.get_str("model.hazard") == "satquad");
  CHECK(cfg.get_num("model.b") == doctest::Approx(0.43));
  CHECK(cfg.get_num("run.T") == doctest::Approx(100.0));
  CHECK(cfg.has("run.T"));
  CHECK_FALSE(cfg.has("run.d"));
  CHECK(cfg.get_num("run.d", 0.05) == 0.05);
  CHECK(cfg.get_str("missing", "dflt") == "dflt");
  CHECK(cfg.get_int("run.T") == 100);
}

TEST_CASE("parse errors carry line numbers") {
  try {
    Config::from_text("a = 1\nbroken line\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  try {
    Config::from_text("a = 1\nb = 2\na = 3\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(Config::from_text("= 1\n"), ConfigError);
  CHECK_THROWS_AS(Config::from_text("x = abc\n").get_num("x"), ConfigError);
  CHECK_THROWS_AS(Config::from_text("x = 1.5\n").get_int("x"), ConfigError);
  CHECK_THROWS_AS(Config::from_file("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("unknown keys are rejected") {
  const auto cfg = Config::from_text("model.hazard = satquad\nmodel.typo = 1\n");
  CHECK_THROWS_AS(cfg.check_known(model_config_keys()), ConfigError);
  const auto ok = Config::from_text("model.hazard = satquad\nmodel.b = 0.43\n");
  CHECK_NOTHROW(ok.check_known(model_config_keys()));
}

TEST_CASE("models from configuration") {
  const auto mq = model_from_config(
      Config::from_text("model.hazard = satquad\nmodel.b = 0.43\n"));
  CHECK(mq.sigma() == 1.0);
  CHECK(mq.phi().kind() == HazardCurve::Kind::SatQuad);
  CHECK(mq.phi().param() == doctest::Approx(0.43 * 0.43));

  const auto mq2 = model_from_config(
      Config::from_text("model.hazard = satquad\nmodel.b_bar = 0.1849\n"));
  CHECK(mq2.phi().param() == doctest::Approx(0.1849));

  const auto ms = model_from_config(
      Config::from_text("model.hazard = sigmoid9\nmodel.b = 1.2\n"));
  CHECK(ms.sigma() == 0.5);
  CHECK(ms.phi().kind() == HazardCurve::Kind::Sigmoid9);

  const auto mc = model_from_config(Config::from_text(
      "model.hazard = constant\nmodel.phi = 2\nmodel.sigma = 0.5\n"));
  CHECK(mc.sigma() == 0.5);
  CHECK(mc.phi()(0.1) == 2.0);

  CHECK_THROWS_AS(model_from_config(Config::from_text("model.hazard = bogus\n")),
                  ConfigError);
  CHECK_THROWS_AS(model_from_config(Config::from_text("model.hazard = sigmoid9\n")),
                  ConfigError);
}

TEST_CASE("format_double round-trips exactly") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> vals = {0.0, 1.0, 0.1, 1.0 / 3.0, 0.4728534437943250,
                              5.379631, 1e-300, 1e300, -2.5e-8};
  for (int i = 0; i < 50; ++i) vals.push_back(std::ldexp(u(rng), i - 25));
  for (double v : vals) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("csv writing and reading round-trip") {
  const std::string path = "/tmp/etm_test_roundtrip.csv";
  const double a = 0.4728534437943250, b = -0.1289023456789;
  write_text_file(path, "# meta line to skip\nx,y\n" + format_double(a) + "," +
                            format_double(b) + "\n");
  const auto rows = read_csv(path);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0] == "x");
  REQUIRE(rows[1].size() == 2);
  CHECK(std::stod(rows[1][0]) == a);
  CHECK(std::stod(rows[1][1]) == b);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_csv("/nonexistent/file.csv"), ConfigError);
}
