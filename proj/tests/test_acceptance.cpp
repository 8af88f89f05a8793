#include "doctest.h"

#include <sstream>

#include "json.hpp"

#include "pgrav/acceptance.hpp"

using namespace pgrav;

#ifndef PGRAV_FIXTURE_DIR
#error "PGRAV_FIXTURE_DIR must be defined"
#endif

TEST_CASE("corrupted fixture fails with the criterion id") {
  AcceptanceOptions opt;
  opt.fixture = load_fixture_file(PGRAV_FIXTURE_DIR "/corrupted.json");
  opt.only = {1, 2, 3};
  const auto r = run_acceptance(opt);
  REQUIRE(r.size() == 3);
  CHECK(r[0].id == 1);
  CHECK_FALSE(r[0].passed);
  CHECK(r[0].measured.find("C(3,3)=4 [FAIL]") != std::string::npos);
  CHECK(format_line(r[0]).rfind("criterion  1 FAIL", 0) == 0);
  CHECK(r[1].passed);
  CHECK_FALSE(r[2].passed);
  CHECK(unexpected_failures(r) == 2);
}

TEST_CASE("reference fixture at the fast level") {
  AcceptanceOptions opt;
  opt.level = AcceptanceLevel::fast;
  opt.fixture = load_fixture_file(PGRAV_FIXTURE_DIR "/acceptance.json");
  const auto r = run_acceptance(opt);
  REQUIRE(r.size() == 15);
  for (int id : {13, 14, 15}) CHECK(r[id - 1].skipped);
  CHECK(unexpected_failures(r) == 0);
  std::ostringstream os;
  write_json(os, r, opt, false);
  const auto j = nlohmann::json::parse(os.str());
  CHECK(j["criteria"].size() == 15);
  CHECK(j["criteria"][0]["status"] == "pass");
  CHECK(j["seed"] == 20240101);
}

TEST_CASE("fixture parsing") {
  std::istringstream bad(R"({"spot_count": []})");
  CHECK_THROWS_AS(load_fixture(bad), std::invalid_argument);
  std::istringstream ratio(R"({"r_over_x1": "3/2"})");
  CHECK(load_fixture(ratio).r_over_x1 == "3/2");
  CHECK_THROWS(load_fixture_file("/nonexistent.json"));
}
