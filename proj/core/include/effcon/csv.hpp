#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "effcon/dynamics.hpp"
#include "effcon/reduction.hpp"

namespace effcon {

/// `t,q,p,dq2,dqp,dp2,E,flags`
std::string_view trajectory_csv_header();

/// One row, floating point at 17 significant digits.
std::string csv_row(const Sample& s);

void write_trajectory_csv(std::ostream& out, const std::vector<Sample>& samples);

/// Parses what write_trajectory_csv produced. Throws std::invalid_argument.
std::vector<Sample> read_trajectory_csv(std::istream& in);

/// `sign,E,pt,dtpt_re,dtpt_im,dpt2,dptq_re,dptq_im,dptp_re,dptp_im` plus one row.
void write_sector_csv(std::ostream& out, const SolvedSector& s);

/// `row,col,re,im`, one line per entry.
void write_dirac_csv(std::ostream& out, const DiracMatrix& m);

}  // namespace effcon
