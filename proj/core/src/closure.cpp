#include <fmt/format.h>

#include "effcon/errors.hpp"
#include "effcon/models.hpp"

namespace effcon {

namespace {

constexpr std::size_t kC = 0, kCt = 1, kCpt = 2, kCq = 3, kCp = 4;

PolyExpr X(Var v) { return PolyExpr(v); }

struct Term {
  std::size_t k;
  PolyExpr coeff;
};

ClosureCell cell(std::initializer_list<Term> terms, PolyExpr residual = {}) {
  ClosureCell c;
  for (const auto& t : terms) c.coefficients[t.k] += t.coeff;
  c.residual = std::move(residual);
  return c;
}

// Fills the lower triangle from the upper one.
void antisymmetrize(ClosureTable& t) {
  for (std::size_t i = 0; i < kNumConstraints; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      for (std::size_t k = 0; k < kNumConstraints; ++k) t[i][j].coefficients[k] = -t[j][i].coefficients[k];
      t[i][j].residual = -t[j][i].residual;
    }
  }
}

ClosureTable make_free_table() {
  const PolyExpr pt = X(Var::pt), p = X(Var::p);
  ClosureTable t{};
  t[kC][kCt] = cell({{kCpt, -2}});
  t[kC][kCq] = cell({{kCp, 2}});
  t[kCt][kCpt] = cell({{kCpt, 4 * pt}, {kCp, -2 * p}});
  t[kCt][kCq] = cell({{kCt, 2 * p}, {kCq, 2 * pt}});
  t[kCt][kCp] = cell({{kCp, 2 * pt}});
  t[kCpt][kCq] = cell({{kCpt, 2 * p}});
  t[kCq][kCp] = cell({{kCpt, 2 * pt}, {kCp, -4 * p}});
  antisymmetrize(t);
  return t;
}

ClosureTable make_quadratic_table() {
  const PolyExpr pt = X(Var::pt), p = X(Var::p), q = X(Var::q);
  const PolyExpr half_ih = Complex{0.0, 0.5} * PolyExpr::hbar();
  const PolyExpr qp_plus = X(Var::Dqp) + half_ih;
  const PolyExpr qp_minus = X(Var::Dqp) - half_ih;
  ClosureTable t{};
  t[kC][kCt] = cell({{kCpt, -2}});
  t[kC][kCq] = cell({{kCp, 2}});
  t[kC][kCp] = cell({{kCq, -2}});
  t[kCt][kCpt] = cell({{kCpt, 4 * pt}, {kCp, -2 * p}, {kCq, -2 * q}},
                      4 * X(Var::Dptp) * X(Var::Dtq) - 4 * X(Var::Dptq) * X(Var::Dtp));
  t[kCt][kCq] = cell({{kCq, 2 * pt}, {kCt, 2 * p}},
                     4 * X(Var::Dtq) * qp_plus - 4 * X(Var::Dq2) * X(Var::Dtp));
  t[kCt][kCp] = cell({{kCp, 2 * pt}, {kCt, -2 * q}},
                     4 * X(Var::Dtq) * X(Var::Dp2) - 4 * X(Var::Dtp) * qp_minus);
  t[kCpt][kCq] = cell({{kCpt, 2 * p}},
                      -4 * X(Var::Dq2) * X(Var::Dptp) + 4 * X(Var::Dptq) * qp_plus);
  t[kCpt][kCp] = cell({{kCpt, -2 * q}},
                      4 * X(Var::Dp2) * X(Var::Dptq) - 4 * X(Var::Dptp) * qp_minus);
  t[kCq][kCp] = cell({{kCpt, 2 * pt}, {kCp, -4 * p}, {kCq, -4 * q}},
                     4 * (X(Var::Dq2) * X(Var::Dp2) - 0.25 * PolyExpr::hbar(2)) - 4 * X(Var::Dqp) * X(Var::Dqp));
  antisymmetrize(t);
  return t;
}

PolyExpr combine(const ClosureCell& c, const std::array<PolyExpr, kNumConstraints>& constraints) {
  PolyExpr out;
  for (std::size_t k = 0; k < kNumConstraints; ++k) {
    if (!c.coefficients[k].is_zero()) out += c.coefficients[k] * constraints[k];
  }
  return out;
}

std::string cell_text(const PolyExpr& e) { return e.is_zero() ? "0" : e.render(); }

}  // namespace

const ClosureTable& free_closure_table() {
  static const ClosureTable t = make_free_table();
  return t;
}

const ClosureTable& quadratic_closure_table() {
  static const ClosureTable t = make_quadratic_table();
  return t;
}

ClosureReport closure_report(const ConstraintSet& cs) {
  const bool quadratic = std::holds_alternative<QuadraticPotential>(cs.model);
  const ClosureTable& table = quadratic ? quadratic_closure_table() : free_closure_table();
  const bool with_lambda = is_time_dependent(cs.model);

  ClosureReport report;
  report.model = model_name(cs.model);
  bool all_zero = true;

  for (std::size_t i = 0; i < kNumConstraints; ++i) {
    for (std::size_t j = 0; j < kNumConstraints; ++j) {
      const ClosureCell& cell = table[i][j];
      {
        ClosureEntry e;
        e.row = i;
        e.col = j;
        e.bracket = bracket(cs.lambda0[i], cs.lambda0[j]);
        e.combination = combine(cell, cs.lambda0);
        e.residual = e.bracket - e.combination;
        e.expected_residual = cell.residual;
        e.matches_expected = e.residual == e.expected_residual;
        e.min_grade = e.residual.min_hbar_grade();
        if (!e.residual.is_zero()) {
          all_zero = false;
          if (!e.matches_expected || e.min_grade < 2) {
            throw MalformedTable(fmt::format("{{{}, {}}} residual {} is not the tabulated {}", constraint_name(i),
                                             constraint_name(j), cell_text(e.residual),
                                             cell_text(e.expected_residual)));
          }
        }
        report.entries.push_back(std::move(e));
      }
      if (!with_lambda) continue;
      // Linear-in-λ part: λħ counts beyond second order, so grade 1 suffices.
      ClosureEntry e;
      e.row = i;
      e.col = j;
      e.lambda_order = 1;
      e.bracket = bracket(cs.lambda0[i], cs.lambda1[j]) + bracket(cs.lambda1[i], cs.lambda0[j]);
      e.combination = combine(cell, cs.lambda1);
      e.residual = e.bracket - e.combination;
      e.matches_expected = e.residual.is_zero();
      e.min_grade = e.residual.min_hbar_grade();
      if (!e.residual.is_zero()) {
        all_zero = false;
        if (e.min_grade < 1) {
          throw MalformedTable(fmt::format("{{{}, {}}} λ-residual {} has grade 0", constraint_name(i),
                                           constraint_name(j), cell_text(e.residual)));
        }
      }
      report.entries.push_back(std::move(e));
    }
  }
  report.verdict = all_zero ? ClosureExpectation::exact : ClosureExpectation::order_hbar;
  return report;
}

std::string ClosureReport::to_table() const {
  std::string out = fmt::format("# closure residuals: {} ({})\n", model,
                                verdict == ClosureExpectation::exact ? "exact" : "order_hbar");
  for (unsigned order = 0; order < 2; ++order) {
    bool any = false;
    for (const auto& e : entries) any = any || e.lambda_order == order;
    if (!any) continue;
    if (order == 1) out += "# coefficient of lambda\n";
    out += "{row,col}";
    for (std::size_t j = 0; j < kNumConstraints; ++j) out += fmt::format(" | {}", constraint_name(j));
    out += '\n';
    for (std::size_t i = 0; i < kNumConstraints; ++i) {
      out += constraint_name(i);
      for (std::size_t j = 0; j < kNumConstraints; ++j) {
        for (const auto& e : entries) {
          if (e.row == i && e.col == j && e.lambda_order == order) out += " | " + cell_text(e.residual);
        }
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace effcon
