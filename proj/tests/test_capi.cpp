#include "rabi_blocks.h"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

namespace {

const char *kSmall = R"({
  "name": "capi_small",
  "model": "two_qubit",
  "hamiltonian": "full",
  "params": {"omega": 1.0, "eps1": 0.5, "eps2": 0.5, "gamma": 1.0, "lam1": 0.3, "lam2": 0.1},
  "n_max": 12,
  "initial_state": {"kind": "pattern", "pattern": [1, -1], "alpha": 1},
  "grid": {"axis": "t", "max": 5, "points": 11},
  "observables": ["sigma1z", "sxx"]
})";

std::string out_dir() {
  const char *env = std::getenv("RB_TEST_OUT");
  const std::filesystem::path p = env ? env : "capi_out";
  std::filesystem::create_directories(p);
  return p.string();
}

std::string take(char *s) {
  std::string r = s ? s : "";
  rb_string_free(s);
  return r;
}

struct Scenario {
  rb_scenario *s = nullptr;
  ~Scenario() { rb_scenario_free(s); }
};

struct Op {
  rb_operator *op = nullptr;
  ~Op() { rb_operator_free(op); }
};

} // namespace

TEST_CASE("library metadata") {
  CHECK(std::string(rb_version()).size() > 0);
  char *names = nullptr;
  REQUIRE(rb_preset_names(&names) == RB_OK);
  const std::string all = take(names);
  CHECK(all.find("fig1\n") != std::string::npos);
  CHECK(all.find("chain_n4_aligned\n") != std::string::npos);
}

TEST_CASE("errors are reported through status codes") {
  rb_scenario *s = nullptr;
  CHECK(rb_scenario_from_preset(nullptr, &s) == RB_INVALID);
  CHECK(rb_scenario_from_preset("missing", &s) == RB_CONFIG);
  CHECK(std::string(rb_last_error()).find("unknown preset") != std::string::npos);
  CHECK(rb_scenario_from_json("{", &s) == RB_CONFIG);
  CHECK(rb_scenario_from_file("/nonexistent/x.json", &s) == RB_CONFIG);
  CHECK(s == nullptr);
  CHECK(rb_verify(nullptr, "x", nullptr) == RB_INVALID);
  CHECK(rb_operator_dim(nullptr) == 0);
  CHECK(std::string(rb_scenario_name(nullptr)).empty());
  rb_scenario_free(nullptr);
  rb_operator_free(nullptr);
  // a successful call clears the message
  char *names = nullptr;
  REQUIRE(rb_preset_names(&names) == RB_OK);
  rb_string_free(names);
  CHECK(std::string(rb_last_error()).empty());
}

TEST_CASE("scenario round trip") {
  Scenario a;
  REQUIRE(rb_scenario_from_json(kSmall, &a.s) == RB_OK);
  CHECK(std::string(rb_scenario_name(a.s)) == "capi_small");
  char *text = nullptr;
  REQUIRE(rb_scenario_to_json(a.s, &text) == RB_OK);
  Scenario b;
  REQUIRE(rb_scenario_from_json(take(text).c_str(), &b.s) == RB_OK);
  CHECK(std::string(rb_scenario_name(b.s)) == "capi_small");
}

TEST_CASE("commands") {
  Scenario sc;
  REQUIRE(rb_scenario_from_json(kSmall, &sc.s) == RB_OK);
  const std::string dir = out_dir();
  char *report = nullptr;

  SUBCASE("verify") {
    CHECK(rb_verify(sc.s, dir.c_str(), &report) == RB_OK);
    CHECK(take(report).find("\"PASS\"") != std::string::npos);
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / "capi_small_verify.json"));
  }
  SUBCASE("simulate") {
    CHECK(rb_simulate(sc.s, dir.c_str(), &report) == RB_OK);
    rb_string_free(report);
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / "capi_small.csv"));
  }
  SUBCASE("compare without a closed form") {
    Scenario fig3;
    REQUIRE(rb_scenario_from_preset("fig3", &fig3.s) == RB_OK);
    CHECK(rb_compare(fig3.s, dir.c_str(), &report) == RB_UNSUPPORTED);
    CHECK(take(report).find("UNSUPPORTED") != std::string::npos);
  }
}

TEST_CASE("Hamiltonian access") {
  Scenario sc;
  REQUIRE(rb_scenario_from_json(kSmall, &sc.s) == RB_OK);
  Op h;
  REQUIRE(rb_scenario_hamiltonian(sc.s, &h.op) == RB_OK);
  const size_t n = rb_operator_dim(h.op);
  CHECK(n == 4 * 13);
  double worst = 0.0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      double re = 0, im = 0, re2 = 0, im2 = 0;
      REQUIRE(rb_operator_entry(h.op, i, j, &re, &im) == RB_OK);
      REQUIRE(rb_operator_entry(h.op, j, i, &re2, &im2) == RB_OK);
      worst = std::max(worst, std::abs(re - re2) + std::abs(im + im2));
    }
  CHECK(worst == 0.0);
  double re = 0, im = 0;
  // omega a^dag a + eps_plus on |uu, n=1>
  REQUIRE(rb_operator_entry(h.op, 1, 1, &re, &im) == RB_OK);
  CHECK(std::abs(re - 2.0) < 1e-15);
  CHECK(rb_operator_entry(h.op, n, 0, &re, &im) == RB_INVALID);
  double c = -1.0;
  REQUIRE(rb_commutator_norm(h.op, h.op, &c) == RB_OK);
  CHECK(c < 1e-13);
}
