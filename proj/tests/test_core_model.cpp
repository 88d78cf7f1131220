#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "orns/core_model.hpp"

using namespace orns;

TEST_CASE("parse shift schedule") {
  auto s = parse_schedule("orns/v1 shift N=4 T=2\n1\n3\n");
  REQUIRE(std::holds_alternative<ShiftSchedule>(s));
  const auto& sh = std::get<ShiftSchedule>(s);
  CHECK(sh.n_nodes() == 4);
  CHECK(sh.period() == 2);
  CHECK(sh.shift_at(0) == 1);
  CHECK(sh.shift_at(1) == 3);
  CHECK(sh.shift_at(5) == 3);
  CHECK(sh.apply(2, 1) == 1);
}

TEST_CASE("shift out of range is rejected") {
  try {
    parse_schedule("orns/v1 shift N=4 T=1\n4\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("shift out of range") != std::string::npos);
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(ShiftSchedule(4, {0, 4}), std::invalid_argument);
}

TEST_CASE("malformed files") {
  CHECK_THROWS_AS(parse_schedule(""), ParseError);
  CHECK_THROWS_AS(parse_schedule("orns/v2 shift N=4 T=1\n0\n"), ParseError);
  CHECK_THROWS_AS(parse_schedule("orns/v1 shift N=4\n0\n"), ParseError);
  CHECK_THROWS_AS(parse_schedule("orns/v1 shift N=4 T=2\n0\n"), ParseError);
  CHECK_THROWS_AS(parse_schedule("orns/v1 shift N=4 T=1\n0\n1\n"), ParseError);
  CHECK_THROWS_AS(parse_schedule("orns/v1 shift N=4 T=1\nx\n"), ParseError);
  CHECK_THROWS_AS(parse_schedule("orns/v1 perm N=3 T=1\n0 0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_schedule("orns/v1 perm N=3 T=1\n0 1\n"), ParseError);
}

TEST_CASE("comments and blank lines are skipped") {
  auto s = parse_schedule("# generated\norns/v1 shift N=5 T=2\n\n2\n# mid\n4\n");
  CHECK(std::get<ShiftSchedule>(s).shifts()[1] == 4);
}

TEST_CASE("serialize and parse round trip") {
  const std::string shift_text = "orns/v1 shift N=7 T=4\n0\n6\n3\n3\n";
  CHECK(serialize_schedule(parse_schedule(shift_text)) == shift_text);
  const std::string perm_text = "orns/v1 perm N=3 T=2\n0 1 2\n2 0 1\n";
  auto p = parse_schedule(perm_text);
  REQUIRE(std::holds_alternative<PermSchedule>(p));
  CHECK(serialize_schedule(p) == perm_text);
  CHECK(std::get<PermSchedule>(p).perm_at(3) == std::vector<std::uint32_t>{2, 0, 1});
}

TEST_CASE("file round trip and digest") {
  const ShiftSchedule s(9, {1, 2, 3, 8});
  const auto path = (std::filesystem::temp_directory_path() / "orns_core_rt.orns").string();
  write_schedule_file(path, s);
  auto back = read_schedule_file(path);
  CHECK(std::get<ShiftSchedule>(back) == s);
  std::remove(path.c_str());
  CHECK(s.digest().size() == 16);
  CHECK(s.digest() == ShiftSchedule(9, {1, 2, 3, 8}).digest());
  CHECK(s.digest() != ShiftSchedule(9, {1, 2, 3, 7}).digest());
  CHECK_THROWS(read_schedule_file("/nonexistent/orns.orns"));
}

TEST_CASE("permutation view of a shift schedule") {
  const ShiftSchedule s(4, {1, 3});
  const auto p = PermSchedule::from_shift(s);
  CHECK(p.perm_at(0) == std::vector<std::uint32_t>{1, 2, 3, 0});
  CHECK(p.perm_at(1) == std::vector<std::uint32_t>{3, 0, 1, 2});
  CHECK(is_permutation_of(p.perm_at(0), 4));
  const std::vector<std::uint32_t> bad{0, 0, 1};
  CHECK_FALSE(is_permutation_of(bad, 3));
  CHECK_THROWS_AS(PermSchedule(3, {{0, 2, 2}}), std::invalid_argument);
}

TEST_CASE("residues wrap into the group") {
  const std::vector<std::int64_t> v{-1, 5, 10, -12};
  const auto s = ShiftSchedule::from_residues(5, v);
  CHECK(std::vector<std::uint32_t>(s.shifts().begin(), s.shifts().end()) ==
        std::vector<std::uint32_t>{4, 0, 0, 3});
}

TEST_CASE("group distributions") {
  CHECK_THROWS_AS(GroupDistribution({0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(GroupDistribution({1.5, -0.5}), std::invalid_argument);
  CHECK_NOTHROW(GroupDistribution({0.5, 0.5 + 1e-12}));
  const auto u = GroupDistribution::uniform(4);
  CHECK(u[3] == doctest::Approx(0.25));
  const auto p = GroupDistribution::point_mass(5, 2);
  CHECK(p[2] == 1.0);
  CHECK(p.negated()[3] == 1.0);
  const GroupDistribution q({0.1, 0.2, 0.3, 0.4});
  const auto qn = q.negated();
  CHECK(qn[0] == 0.1);
  CHECK(qn[1] == 0.4);
  CHECK(qn[3] == 0.2);
}

TEST_CASE("lstar") {
  CHECK(lstar(1, 1024) == doctest::Approx(1024));
  CHECK(lstar(10, 1024) == doctest::Approx(20).epsilon(1e-12));
  CHECK(lstar(2, 1024) == doctest::Approx(64).epsilon(1e-12));
}

TEST_CASE("spray config validation") {
  CHECK(SprayConfig::natural_start_set(2, 3, 12) == StartSet::aligned);
  CHECK(SprayConfig::natural_start_set(2, 3, 13) == StartSet::all);
  SprayConfig c{2, 7, Direction::forward, StartSet::all};
  try {
    c.validate(13);
    FAIL("expected phase overrun");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("phase overrun: lambda*h = 14") != std::string::npos);
  }
  c.phase_len = 6;
  CHECK_NOTHROW(c.validate(13));
  c.start_set = StartSet::aligned;
  CHECK_THROWS(c.validate(13));
  CHECK_NOTHROW(c.validate(12));
}

TEST_CASE("permutation demands") {
  CHECK_THROWS(DemandSpec(0.5, {}));
  CHECK_THROWS(DemandSpec(0.5, {{0, 0}}));
  CHECK_THROWS(DemandSpec(-0.1, {{0, 1}}));
  const DemandSpec d(0.25, {{1, 0}, {0, 1}});
  CHECK(d.n_nodes() == 2);
  CHECK(d.perm_at(3)[0] == 0);
}
