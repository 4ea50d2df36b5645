#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace scplan {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class RowSense { less_equal, greater_equal, equal };

struct LpTerm {
  int var = 0;
  double coef = 0.0;
};

struct LpRow {
  std::string name;
  std::vector<LpTerm> terms;
  RowSense sense = RowSense::equal;
  double rhs = 0.0;
};

/// Minimize c'x subject to linear rows and finite lower / possibly infinite
/// upper variable bounds.
class LpProblem {
 public:
  int add_variable(std::string name, double cost, double lower = 0.0, double upper = kInfinity);
  int add_row(std::string name, std::vector<LpTerm> terms, RowSense sense, double rhs);

  int num_variables() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const std::vector<double>& cost() const { return cost_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<std::string>& variable_names() const { return names_; }
  const std::vector<LpRow>& rows() const { return rows_; }

  double objective_value(const std::vector<double>& x) const;
  /// Largest absolute violation of any row or bound.
  double max_violation(const std::vector<double>& x) const;

  /// CPLEX LP text format, for cross-checking with external solvers.
  void write_lp_format(std::ostream& out) const;

 private:
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<std::string> names_;
  std::vector<LpRow> rows_;
};

}  // namespace scplan
