#include "scplan/lp_problem.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace scplan {

int LpProblem::add_variable(std::string name, double cost, double lower, double upper) {
  if (!std::isfinite(lower)) throw std::invalid_argument("variable '" + name + "' needs a finite lower bound");
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  names_.push_back(std::move(name));
  return num_variables() - 1;
}

int LpProblem::add_row(std::string name, std::vector<LpTerm> terms, RowSense sense, double rhs) {
  for (const auto& t : terms)
    if (t.var < 0 || t.var >= num_variables())
      throw std::out_of_range("row '" + name + "' references an unknown variable");
  rows_.push_back({std::move(name), std::move(terms), sense, rhs});
  return num_rows() - 1;
}

double LpProblem::objective_value(const std::vector<double>& x) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < cost_.size(); ++j) sum += cost_[j] * x[j];
  return sum;
}

double LpProblem::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < cost_.size(); ++j) {
    worst = std::max(worst, lower_[j] - x[j]);
    if (std::isfinite(upper_[j])) worst = std::max(worst, x[j] - upper_[j]);
  }
  for (const auto& row : rows_) {
    double lhs = 0.0;
    for (const auto& t : row.terms) lhs += t.coef * x[t.var];
    switch (row.sense) {
      case RowSense::less_equal: worst = std::max(worst, lhs - row.rhs); break;
      case RowSense::greater_equal: worst = std::max(worst, row.rhs - lhs); break;
      case RowSense::equal: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
    }
  }
  return worst;
}

namespace {

void write_term(std::ostream& out, double coef, const std::string& name, bool first) {
  if (coef < 0)
    out << " - ";
  else if (!first)
    out << " + ";
  else
    out << " ";
  out << std::abs(coef) << " " << name;
}

}  // namespace

void LpProblem::write_lp_format(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  out << "\\ scplan deterministic plan\nMinimize\n obj:";
  bool first = true;
  for (std::size_t j = 0; j < cost_.size(); ++j) {
    if (cost_[j] == 0.0) continue;
    write_term(out, cost_[j], names_[j], first);
    first = false;
  }
  if (first) out << " 0 " << (names_.empty() ? std::string("x") : names_.front());
  out << "\nSubject To\n";
  for (const auto& row : rows_) {
    out << " " << row.name << ":";
    bool head = true;
    for (const auto& t : row.terms) {
      write_term(out, t.coef, names_[t.var], head);
      head = false;
    }
    if (head) out << " 0 " << names_.front();
    switch (row.sense) {
      case RowSense::less_equal: out << " <= "; break;
      case RowSense::greater_equal: out << " >= "; break;
      case RowSense::equal: out << " = "; break;
    }
    out << row.rhs << "\n";
  }
  out << "Bounds\n";
  for (std::size_t j = 0; j < cost_.size(); ++j) {
    if (std::isfinite(upper_[j]))
      out << " " << lower_[j] << " <= " << names_[j] << " <= " << upper_[j] << "\n";
    else if (lower_[j] != 0.0)
      out << " " << names_[j] << " >= " << lower_[j] << "\n";
  }
  out << "End\n";
  out.precision(old_precision);
}

}  // namespace scplan
