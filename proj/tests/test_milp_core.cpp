#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "pooling/milp_model.hpp"
#include "pooling/mps_io.hpp"

using namespace pooling;

namespace {

// One model exercising every bound flavour, both kinds, and metadata tags.
MilpModel kitchen_sink() {
  MilpModel m("sink");
  m.set_objective_sense(ObjSense::maximize);
  int x = m.add_continuous("x", 0.0, 4.0, "flow");
  int y = m.add_continuous("y", -2.0, kInfinity, "level");
  int z = m.add_continuous("z", -kInfinity, kInfinity);
  int w = m.add_continuous("w", 1.5, 1.5);          // fixed
  int u = m.add_continuous("u", -kInfinity, 3.0);   // upper only
  int b1 = m.add_binary("b1", "bit");
  int b2 = m.add_binary("b2");
  m.add_objective_term(x, 2.0);
  m.add_objective_term(y, -1.0);
  m.add_objective_term(b1, 0.5);
  m.add_row("r1", {{x, 1.0}, {y, 2.0}, {b1, -3.0}}, RowSense::le, 5.0);
  m.add_row("r2", {{z, 1.0}, {w, -1.0}}, RowSense::eq, 0.25);
  m.add_row("r3", {{u, 4.0}, {b2, 1.0}}, RowSense::ge, -1.0);
  return m;
}

}  // namespace

TEST_CASE("model container enforces its invariants") {
  MilpModel m;
  int x = m.add_continuous("x", 0.0, 1.0);
  CHECK_THROWS_AS(m.add_continuous("x", 0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(m.add_variable("b", 0.0, 2.0, VarKind::binary),
                  std::invalid_argument);
  CHECK_THROWS_AS(m.add_continuous("bad", 2.0, 1.0), std::invalid_argument);
  m.add_row("r", {{x, 1.0}}, RowSense::le, 1.0);
  CHECK_THROWS_AS(m.add_row("r", {{x, 1.0}}, RowSense::le, 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(m.add_row("r2", {{5, 1.0}}, RowSense::le, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(m.add_objective_term(9, 1.0), std::invalid_argument);
  CHECK(m.var_index("x") == 0);
  CHECK(m.var_index("nope") == -1);
  CHECK_NOTHROW(m.check());
}

TEST_CASE("objective and violation helpers") {
  MilpModel m = kitchen_sink();
  CHECK(m.num_binaries() == 2);
  std::vector<double> values = {1.0, 0.0, 1.75, 1.5, 0.0, 1.0, 0.0};
  CHECK(m.objective_value(values) == doctest::Approx(2.0 + 0.5));
  // r2: z - w = 0.25 exactly at these values.
  CHECK(m.max_row_violation(values) == doctest::Approx(0.0));
  values[2] = 3.75;  // now r2 is off by 2, scaled by 1 + |1| + |-1| = 3
  CHECK(m.max_row_violation(values) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("lp relaxation re-kinds binaries and nothing else") {
  MilpModel m = kitchen_sink();
  MilpModel relaxed = lp_relaxation(m);
  CHECK(relaxed.num_binaries() == 0);
  CHECK(relaxed.variables().size() == m.variables().size());
  for (const auto& v : relaxed.variables()) CHECK(v.kind == VarKind::continuous);
  CHECK(relaxed.rows() == m.rows());
  CHECK(relaxed.objective() == m.objective());
  CHECK(m.num_binaries() == 2);  // original untouched

  MilpModel pure("lp");
  pure.add_continuous("x", 0.0, 1.0);
  CHECK(lp_relaxation(pure) == pure);
}

TEST_CASE("mps writing round-trips through the reader") {
  MilpModel m = kitchen_sink();
  std::string text = write_mps(m);
  MilpModel back = read_mps(text);
  CHECK(back == m);
  // Variable tags survive via the comment header.
  CHECK(back.variables()[0].tag == "flow");
  CHECK(back.variables()[5].tag == "bit");

  SUBCASE("minimization and orphan variables") {
    MilpModel m2("tiny");
    m2.set_objective_sense(ObjSense::minimize);
    m2.add_continuous("a", 0.0, kInfinity);
    m2.add_continuous("orphan", 0.0, 2.0);  // appears in no row, no objective
    m2.add_objective_term(0, 1.0);
    m2.add_row("r", {{0, 1.0}}, RowSense::ge, 1.0);
    CHECK(read_mps(write_mps(m2)) == m2);
  }
}

TEST_CASE("mps reader reports malformed input with line numbers") {
  MilpModel m = kitchen_sink();
  std::string good = write_mps(m);

  SUBCASE("ranges are unsupported") {
    std::string text = good;
    text.replace(text.find("BOUNDS"), 6, "RANGES");
    CHECK_THROWS_WITH_AS(read_mps(text), doctest::Contains("RANGES"),
                         std::runtime_error);
  }
  SUBCASE("unparsable numbers carry the line") {
    std::string text = good;
    auto at = text.find("0.25");  // rhs of r2
    REQUIRE(at != std::string::npos);
    text.replace(at, 4, "oops");
    CHECK_THROWS_WITH_AS(read_mps(text), doctest::Contains("line"),
                         std::runtime_error);
  }
  SUBCASE("rows must reference declared names") {
    CHECK_THROWS_AS(read_mps("NAME t\nROWS\n N obj\nCOLUMNS\n x zzz 1\n"
                             "ENDATA\n"),
                    std::runtime_error);
  }
  SUBCASE("general integers are rejected") {
    MilpModel m2("int");
    m2.add_variable("n", 0.0, 1.0, VarKind::binary);
    m2.add_row("r", {{0, 1.0}}, RowSense::le, 1.0);
    std::string text = write_mps(m2);
    auto at = text.find("UP BND  n  1");
    REQUIRE(at != std::string::npos);
    text.replace(at, 12, "UP BND  n  7");
    CHECK_THROWS_WITH_AS(read_mps(text), doctest::Contains("binary"),
                         std::runtime_error);
  }
}

TEST_CASE("lp writer emits a readable deterministic document") {
  MilpModel m = kitchen_sink();
  std::string text = write_lp(m);
  CHECK(text.find("Maximize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("Binaries") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
  CHECK(text == write_lp(m));
}

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-3.6) == "-3.6");
  for (double v : {1.0 / 3.0, 2.2, 1e30, -4.9406564584124654e-324, 0.0}) {
    // strtod, not stod: stod throws out_of_range on denormals.
    CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
  }
}
