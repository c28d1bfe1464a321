#include "effcon/csv.hpp"

#include <fmt/format.h>

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace effcon {

std::string_view trajectory_csv_header() { return "t,q,p,dq2,dqp,dp2,E,flags"; }

std::string csv_row(const Sample& s) {
  return fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}", s.time, s.state.q, s.state.p,
                     s.state.dq2, s.state.dqp, s.state.dp2, s.E, s.flags);
}

void write_trajectory_csv(std::ostream& out, const std::vector<Sample>& samples) {
  out << trajectory_csv_header() << '\n';
  for (const Sample& s : samples) out << csv_row(s) << '\n';
}

std::vector<Sample> read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != trajectory_csv_header()) {
    throw std::invalid_argument("missing trajectory CSV header");
  }
  std::vector<Sample> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    double v[7];
    for (double& x : v) {
      if (!std::getline(row, cell, ',')) throw std::invalid_argument(fmt::format("line {}: too few columns", lineno));
      x = std::stod(cell);
    }
    if (!std::getline(row, cell)) throw std::invalid_argument(fmt::format("line {}: missing flags", lineno));
    Sample s;
    s.time = v[0];
    s.state = {v[0], v[1], v[2], v[3], v[4], v[5]};
    s.E = v[6];
    s.flags = static_cast<std::uint32_t>(std::stoul(cell));
    out.push_back(s);
  }
  return out;
}

void write_sector_csv(std::ostream& out, const SolvedSector& s) {
  out << "sign,E,pt,dtpt_re,dtpt_im,dpt2,dptq_re,dptq_im,dptp_re,dptp_im\n";
  out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                     s.sign == Branch::plus ? "+" : "-", s.E, s.pt, s.dtpt.real(), s.dtpt.imag(), s.dpt2,
                     s.dptq.real(), s.dptq.imag(), s.dptp.real(), s.dptp.imag());
}

void write_dirac_csv(std::ostream& out, const DiracMatrix& m) {
  out << "row,col,re,im\n";
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) out << fmt::format("{},{},{:.17g},{:.17g}\n", i + 1, j + 1, m(i, j).real(), m(i, j).imag());
  }
}

}  // namespace effcon
