#include <doctest.h>

#include <sstream>

#include "effcon/csv.hpp"

using namespace effcon;

TEST_CASE("trajectory CSV round trip is exact") {
  const Trajectory traj = integrate(QuadraticPotential{0.0}, {0.0, 10.0, 0.0, 0.5, 0.0, 0.5}, {0.0, 1.0},
                                    AlgebraContext(1.0));
  std::ostringstream out;
  write_trajectory_csv(out, traj.samples);
  const std::string text = out.str();
  CHECK(text.rfind("t,q,p,dq2,dqp,dp2,E,flags\n", 0) == 0);

  std::istringstream in(text);
  const std::vector<Sample> back = read_trajectory_csv(in);
  REQUIRE(back.size() == traj.samples.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].time == traj.samples[i].time);
    CHECK(back[i].state == traj.samples[i].state);
    CHECK(back[i].E == traj.samples[i].E);
    CHECK(back[i].flags == traj.samples[i].flags);
  }
  std::ostringstream again;
  write_trajectory_csv(again, back);
  CHECK(again.str() == text);
}

TEST_CASE("row format") {
  Sample s;
  s.time = 0.1;
  s.state = {0.1, 1.0 / 3.0, -2.0, 0.5, 0.0, 1e-20};
  s.E = 3.0;
  s.flags = kMomentBound | kInadmissible;
  CHECK(csv_row(s) == "0.10000000000000001,0.33333333333333331,-2,0.5,0,9.9999999999999995e-21,3,3");
}

TEST_CASE("malformed CSV") {
  std::istringstream no_header("1,2,3\n");
  CHECK_THROWS_AS(read_trajectory_csv(no_header), std::invalid_argument);
  std::istringstream short_row("t,q,p,dq2,dqp,dp2,E,flags\n0,1,2\n");
  CHECK_THROWS_AS(read_trajectory_csv(short_row), std::invalid_argument);
}

TEST_CASE("sector and Dirac matrix CSVs") {
  const AlgebraContext ctx(0.5);
  const ReducedState r{0.0, 0.3, 1.0, 0.4, 0.0, 0.4};
  std::ostringstream sector;
  write_sector_csv(sector, solve_pt_sector(FreeMassive{1.0}, r, Branch::plus, ctx));
  CHECK(sector.str().rfind("sign,E,pt,", 0) == 0);
  CHECK(sector.str().find("\n+,") != std::string::npos);

  std::ostringstream dirac;
  write_dirac_csv(dirac, dirac_matrix(FreeMassive{1.0}, r, Branch::plus, ctx));
  std::size_t lines = 0;
  for (char c : dirac.str()) lines += c == '\n';
  CHECK(lines == 37);
}
