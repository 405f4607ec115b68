#include <doctest.h>

#include <random>

#include "crn/error.hpp"
#include "crn/model.hpp"
#include "crn/parser.hpp"
#include "support.hpp"

using crn::Network;
using crn::parse_network;
using crn::serialize_network;

TEST_CASE("basic reaction lines") {
  const auto doc = parse_network("2 X1 -> 2 X2 ; k = 1\nX2 -> X1 ; k = 1\n");
  CHECK(doc.species == std::vector<std::string>{"X1", "X2"});
  CHECK(doc.reactions.size() == 2);
  const Network net = doc.to_network();
  CHECK(net.num_complexes() == 4);
  CHECK(net.s()(0, 0) == -2.0);
}

TEST_CASE("zero complex inflow") {
  const auto doc = parse_network("0 -> X1 ; k = 0.008");
  CHECK(doc.reactions[0].reactant.is_zero());
  CHECK(doc.reactions[0].rate == 0.008);
}

TEST_CASE("reversible shorthand expands to two reactions") {
  const auto doc = parse_network("X1 <-> X3 ; k = 1, 1");
  REQUIRE(doc.reactions.size() == 2);
  CHECK(doc.reactions[0].reactant[0] == 1.0);
  CHECK(doc.reactions[0].product[1] == 1.0);
  CHECK(doc.reactions[1].reactant[1] == 1.0);
  CHECK(doc.reactions[1].product[0] == 1.0);
}

TEST_CASE("headers") {
  const auto doc = parse_network(
      "# comment line\n"
      "@name = demo net\n"
      "@species = A, B\n"
      "@equilibrium = (1, 2)\n"
      "@x0 = (0.5, 0.25)\n"
      "A -> B ; k = 2.5  # trailing comment\n");
  CHECK(doc.name == "demo net");
  CHECK(doc.species == std::vector<std::string>{"A", "B"});
  REQUIRE(doc.equilibrium_hint.has_value());
  CHECK((*doc.equilibrium_hint)[1] == 2.0);
  REQUIRE(doc.x0_hint.has_value());
  CHECK((*doc.x0_hint)[1] == 0.25);
}

TEST_CASE("parse errors carry positions") {
  SUBCASE("missing arrow") {
    try {
      parse_network("X1 + X2 ; k = 1");
      FAIL("expected ParseError");
    } catch (const crn::ParseError& e) {
      CHECK(e.line() == 1);
      CHECK(e.column() == 9);
    }
  }
  SUBCASE("zero rate") {
    CHECK_THROWS_WITH_AS(parse_network("X1 -> X2 ; k = 0"),
                         doctest::Contains("rate must be positive"), crn::ParseError);
  }
  SUBCASE("negative rate") {
    CHECK_THROWS_AS(parse_network("X1 -> X2 ; k = -2"), crn::ParseError);
  }
  SUBCASE("overflowing rate literal") {
    CHECK_THROWS_WITH_AS(parse_network("X1 -> X2 ; k = 1e999"), doctest::Contains("finite"),
                         crn::ParseError);
  }
  SUBCASE("self loop rejected") {
    CHECK_THROWS_WITH_AS(parse_network("X1 -> X1 ; k = 1"), doctest::Contains("identical"),
                         crn::ParseError);
  }
  SUBCASE("negative coefficient needs @generalized") {
    CHECK_THROWS_WITH_AS(parse_network("X1 -> -98 X1 + X2 ; k = 1"),
                         doctest::Contains("@generalized"), crn::ParseError);
  }
  SUBCASE("undeclared species with @species") {
    CHECK_THROWS_WITH_AS(parse_network("@species = A\nA -> B ; k = 1"),
                         doctest::Contains("not listed"), crn::ParseError);
  }
}

TEST_CASE("serialize zero complex and generalized stoichiometry") {
  const Network inflow = parse_network("0 -> X1 ; k = 0.5").to_network();
  CHECK(serialize_network(inflow).find("0 -> X1") != std::string::npos);

  // reverse reconstruction of the row-2 published triple: 2X -> -98X, X -> 101X
  const Network rev = Network::build(
      {"Xh1"}, {{crn::Complex({2.0}), crn::Complex({-98.0}), 0.02},
                {crn::Complex({1.0}), crn::Complex({101.0}), 0.02}},
      /*generalized=*/true);
  const std::string text = serialize_network(rev);
  CHECK(text.find("-98 Xh1") != std::string::npos);
  CHECK(text.find("@generalized") != std::string::npos);
  const Network back = parse_network(text).to_network();
  CHECK(back.z() == rev.z());
  CHECK(back.s() == rev.s());
  CHECK(back.kirchhoff() == rev.kirchhoff());
}

TEST_CASE("round trip is the identity on the matrices") {
  SUBCASE("table row 2") {
    const Network net = testsupport::load_network("table1_row2.crn");
    const Network back = parse_network(serialize_network(net)).to_network();
    CHECK(back.z() == net.z());
    CHECK(back.b() == net.b());
    CHECK(back.s() == net.s());
    CHECK(back.kirchhoff() == net.kirchhoff());
  }
  SUBCASE("random networks") {
    std::mt19937_64 rng(testsupport::test_seed() + 3);
    for (int trial = 0; trial < 100; ++trial) {
      const Network net = testsupport::random_network(rng);
      const Network back = parse_network(serialize_network(net)).to_network();
      CHECK(back.z() == net.z());
      CHECK(back.b() == net.b());
      CHECK(back.s() == net.s());
      CHECK(back.kirchhoff() == net.kirchhoff());
      CHECK(back.species_names() == net.species_names());
    }
  }
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-9, 123456.789, -0.008, 2.0}) {
    CHECK(std::strtod(crn::format_double(v).c_str(), nullptr) == v);
  }
}
