#include "scplan/lp_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace scplan {

const char* lp_status_name(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// min c'x  s.t.  Ax = b, 0 <= x <= u  (u may be infinite).
struct StandardForm {
  SpMat A;
  Vec b;
  Vec c;
  Vec u;
  std::vector<int> column_of_var;   // -1 when fixed
  std::vector<double> fixed_value;  // value of fixed variables, lower bound otherwise
  std::vector<int> std_row_of_row;  // -1 when dropped as trivially satisfied
  bool trivially_infeasible = false;
};

StandardForm to_standard_form(const LpProblem& p) {
  StandardForm sf;
  const int nv = p.num_variables();
  sf.column_of_var.assign(static_cast<std::size_t>(nv), -1);
  sf.fixed_value = p.lower();
  std::vector<double> cost;
  std::vector<double> upper;
  for (int j = 0; j < nv; ++j) {
    const double lo = p.lower()[j];
    const double hi = p.upper()[j];
    const double width = hi - lo;
    if (width < -1e-9 * std::max(1.0, std::abs(lo))) sf.trivially_infeasible = true;
    if (width <= 1e-12 * std::max(1.0, std::abs(lo))) continue;
    sf.column_of_var[j] = static_cast<int>(cost.size());
    cost.push_back(p.cost()[j]);
    upper.push_back(width);
  }

  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> rhs;
  sf.std_row_of_row.assign(p.rows().size(), -1);
  for (std::size_t r = 0; r < p.rows().size(); ++r) {
    const LpRow& row = p.rows()[r];
    double b = row.rhs;
    bool has_column = false;
    for (const auto& t : row.terms) {
      b -= t.coef * sf.fixed_value[t.var];
      if (sf.column_of_var[t.var] >= 0 && t.coef != 0.0) has_column = true;
    }
    if (!has_column) {
      const double slack = 1e-9 * std::max(1.0, std::abs(row.rhs));
      const bool ok = row.sense == RowSense::equal          ? std::abs(b) <= slack
                      : row.sense == RowSense::less_equal   ? b >= -slack
                                                            : b <= slack;
      if (!ok) sf.trivially_infeasible = true;
      continue;
    }
    const int sr = static_cast<int>(rhs.size());
    sf.std_row_of_row[r] = sr;
    for (const auto& t : row.terms) {
      const int col = sf.column_of_var[t.var];
      if (col >= 0 && t.coef != 0.0) triplets.emplace_back(sr, col, t.coef);
    }
    if (row.sense != RowSense::equal) {
      const int col = static_cast<int>(cost.size());
      cost.push_back(0.0);
      upper.push_back(kInfinity);
      triplets.emplace_back(sr, col, row.sense == RowSense::less_equal ? 1.0 : -1.0);
    }
    rhs.push_back(b);
  }
  const auto m = static_cast<Eigen::Index>(rhs.size());
  const auto n = static_cast<Eigen::Index>(cost.size());
  sf.A.resize(m, n);
  sf.A.setFromTriplets(triplets.begin(), triplets.end());
  sf.A.makeCompressed();
  sf.b = Eigen::Map<Vec>(rhs.data(), m);
  sf.c = Eigen::Map<Vec>(cost.data(), n);
  sf.u = Eigen::Map<Vec>(upper.data(), n);
  return sf;
}

enum class CoreStatus { converged, diverged, stalled };

struct CoreResult {
  CoreStatus status = CoreStatus::stalled;
  Vec x, y;
  int iterations = 0;
  double primal = 0.0, dual = 0.0, gap = 0.0;
};

double max_step(const Vec& v, const Vec& dv) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
  return alpha;
}

double inf_norm(const Vec& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

// Newton directions come from the normal equations A D A' dy = r, or with
// `augmented` from the regularized system [-D^-1 A'; A 0], which copes better
// with extreme D near a degenerate optimum.
CoreResult ipm_core(const SpMat& A, const Vec& b, const Vec& c, const Vec& u,
                    const IpmOptions& options, bool augmented = false) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  Vec has_upper(n), ub(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    has_upper[j] = std::isfinite(u[j]) ? 1.0 : 0.0;
    ub[j] = std::isfinite(u[j]) ? u[j] : 0.0;
  }
  const double nb = has_upper.sum();
  const SpMat At = A.transpose();

  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> chol;
  bool analyzed = false;
  const auto factor = [&](const Vec& d) {
    SpMat M = A * d.asDiagonal() * At;
    for (Eigen::Index i = 0; i < m; ++i) {
      double& diag = M.coeffRef(i, i);
      diag += std::max(1e-14, 1e-12 * diag);
    }
    if (!analyzed) {
      chol.analyzePattern(M);
      analyzed = true;
    }
    chol.factorize(M);
    if (chol.info() != Eigen::Success) throw SolverError("normal-equation factorization failed");
  };

  constexpr double kKktShift = 1e-8;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> kkt;
  bool kkt_analyzed = false;
  Vec dinv(n);
  // False on a zero pivot.
  const auto factor_kkt = [&](const Vec& d) {
    dinv = d.cwiseInverse().cwiseMin(1e20);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(A.nonZeros() + n + m));
    for (Eigen::Index j = 0; j < n; ++j) t.emplace_back(j, j, -(dinv[j] + kKktShift));
    for (Eigen::Index k = 0; k < A.outerSize(); ++k)
      for (SpMat::InnerIterator it(A, k); it; ++it) t.emplace_back(n + it.row(), it.col(), it.value());
    for (Eigen::Index i = 0; i < m; ++i) t.emplace_back(n + i, n + i, kKktShift);
    SpMat K(n + m, n + m);
    K.setFromTriplets(t.begin(), t.end());
    if (!kkt_analyzed) {
      kkt.analyzePattern(K);
      kkt_analyzed = true;
    }
    kkt.factorize(K);
    return kkt.info() == Eigen::Success;
  };

  // Starting point in the spirit of Mehrotra's heuristic.
  Vec x(n), z(n), w(n), v(n), y(m);
  {
    factor(Vec::Ones(n));
    x = At * chol.solve(b);
    y = chol.solve(A * c);
    z = c - At * y;
    const double dx = std::max(-1.5 * (n ? x.minCoeff() : 0.0), 0.0);
    const double dz = std::max(-1.5 * (n ? z.minCoeff() : 0.0), 0.0);
    x.array() += dx;
    z.array() += dz;
    const double xz = x.dot(z);
    x.array() += 0.5 * xz / std::max(z.sum(), 1e-12) + 1e-2;
    z.array() += 0.5 * xz / std::max(x.sum(), 1e-12) + 1e-2;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (has_upper[j] == 0.0) {
        w[j] = 0.0;
        v[j] = 0.0;
        continue;
      }
      x[j] = std::clamp(x[j], 0.05 * ub[j], 0.95 * ub[j]);
      w[j] = ub[j] - x[j];
      v[j] = z[j];
    }
  }

  const double b_norm = 1.0 + inf_norm(b);
  const double c_norm = 1.0 + inf_norm(c);
  const double u_norm = 1.0 + inf_norm(ub);
  CoreResult result;
  CoreResult best;
  double best_merit = kInfinity;
  Vec d(n), rb(m), ru(n), rc(n);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter;
    rb = b - A * x;
    ru = (ub - x - w).cwiseProduct(has_upper);
    rc = c - At * y - z + v;
    const double pobj = c.dot(x);
    const double dobj = b.dot(y) - ub.dot(v);
    result.primal = std::max(inf_norm(rb) / b_norm, inf_norm(ru) / u_norm);
    result.dual = inf_norm(rc) / c_norm;
    result.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
    const double merit = std::max({result.primal, result.dual, result.gap});
    if (merit <= options.tolerance) {
      result.status = CoreStatus::converged;
      break;
    }
    if (merit < best_merit) {
      best_merit = merit;
      best.x = x;
      best.y = y;
      best.iterations = iter;
      best.primal = result.primal;
      best.dual = result.dual;
      best.gap = result.gap;
    }
    // Near the optimum the normal equations lose accuracy; once the
    // iterates move away from an acceptable point, stop there.
    if (best_merit <= options.acceptable_tolerance && merit > 100.0 * best_merit) break;
    if (inf_norm(x) > 1e13 || inf_norm(y) > 1e13) {
      result.status = CoreStatus::diverged;
      break;
    }
    const double mu = (x.dot(z) + w.dot(v)) / static_cast<double>(n + nb);

    for (Eigen::Index j = 0; j < n; ++j) {
      double inv = z[j] / x[j];
      if (has_upper[j] != 0.0) inv += v[j] / w[j];
      d[j] = 1.0 / inv;
    }
    if (!augmented) factor(d);
    else if (!factor_kkt(d)) break;

    // Solves the Newton system for complementarity targets rxz and rwv.
    Vec dx(n), dy(m), dz(n), dw(n), dv(n);
    const auto newton = [&](const Vec& rxz, const Vec& rwv) {
      Vec rhat = rc - rxz.cwiseQuotient(x);
      for (Eigen::Index j = 0; j < n; ++j)
        if (has_upper[j] != 0.0) rhat[j] += (rwv[j] - v[j] * ru[j]) / w[j];
      if (augmented) {
        Vec rhs(n + m);
        rhs << rhat, rb;
        Vec sol = kkt.solve(rhs);
        for (int pass = 0; pass < 10; ++pass) {
          Vec resid(n + m);
          resid.head(n) = rhat + dinv.cwiseProduct(sol.head(n)) - At * sol.tail(m);
          resid.tail(m) = rb - A * sol.head(n);
          if (inf_norm(resid) <= 1e-15 * (1.0 + inf_norm(rhs))) break;
          sol += kkt.solve(resid);
        }
        dx = sol.head(n);
        dy = sol.tail(m);
      } else {
        const Vec rhs = rb + A * d.cwiseProduct(rhat);
        dy = chol.solve(rhs);
        // Iterative refinement against the unregularized system while it helps.
        double last = kInfinity;
        for (int pass = 0; pass < 10; ++pass) {
          const Vec resid = rhs - A * d.cwiseProduct(At * dy);
          const double norm = inf_norm(resid);
          if (norm <= 1e-14 * (1.0 + inf_norm(rhs)) || norm >= 0.5 * last) break;
          last = norm;
          dy += chol.solve(resid);
        }
        dx = d.cwiseProduct(At * dy - rhat);
      }
      dz = (rxz - z.cwiseProduct(dx)).cwiseQuotient(x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (has_upper[j] == 0.0) {
          dw[j] = 0.0;
          dv[j] = 0.0;
        } else {
          dw[j] = ru[j] - dx[j];
          dv[j] = (rwv[j] - v[j] * dw[j]) / w[j];
        }
      }
    };

    newton(-x.cwiseProduct(z), -w.cwiseProduct(v));
    const double ap_aff = std::min(max_step(x, dx), max_step(w, dw));
    const double ad_aff = std::min(max_step(z, dz), max_step(v, dv));
    const double mu_aff = ((x + ap_aff * dx).dot(z + ad_aff * dz) +
                           (w + ap_aff * dw).dot(v + ad_aff * dv)) /
                          static_cast<double>(n + nb);
    const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);
    const Vec rxz = Vec::Constant(n, sigma * mu) - x.cwiseProduct(z) - dx.cwiseProduct(dz);
    const Vec rwv =
        (Vec::Constant(n, sigma * mu) - w.cwiseProduct(v) - dw.cwiseProduct(dv)).cwiseProduct(
            has_upper);
    newton(rxz, rwv);

    const double eta = std::max(0.9, 1.0 - mu);
    const double ap = std::min(1.0, eta * std::min(max_step(x, dx), max_step(w, dw)));
    const double ad = std::min(1.0, eta * std::min(max_step(z, dz), max_step(v, dv)));
    x += ap * dx;
    w += ap * dw;
    y += ad * dy;
    z += ad * dz;
    v += ad * dv;
    // Keep strictly interior against rounding.
    for (Eigen::Index j = 0; j < n; ++j) {
      x[j] = std::max(x[j], 1e-300);
      z[j] = std::max(z[j], 1e-300);
      if (has_upper[j] != 0.0) {
        w[j] = std::max(w[j], 1e-300);
        v[j] = std::max(v[j], 1e-300);
      }
    }
  }
  if (result.status == CoreStatus::converged || result.status == CoreStatus::diverged) {
    result.x = x;
    result.y = y;
    return result;
  }
  if (best_merit <= options.acceptable_tolerance) {
    best.status = CoreStatus::converged;
    return best;
  }
  result.x = x;
  result.y = y;
  return result;
}

// Smallest total violation |Ax - b|_1 over the bounds; zero iff feasible.
double phase_one_violation(const StandardForm& sf, const IpmOptions& options) {
  const Eigen::Index m = sf.A.rows();
  const Eigen::Index n = sf.A.cols();
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index k = 0; k < sf.A.outerSize(); ++k)
    for (SpMat::InnerIterator it(sf.A, k); it; ++it)
      triplets.emplace_back(it.row(), it.col(), it.value());
  for (Eigen::Index i = 0; i < m; ++i) {
    triplets.emplace_back(i, n + i, 1.0);
    triplets.emplace_back(i, n + m + i, -1.0);
  }
  SpMat A1(m, n + 2 * m);
  A1.setFromTriplets(triplets.begin(), triplets.end());
  Vec c1 = Vec::Zero(n + 2 * m);
  c1.tail(2 * m).setOnes();
  Vec u1(n + 2 * m);
  u1.head(n) = sf.u;
  u1.tail(2 * m).setConstant(kInfinity);
  IpmOptions relaxed = options;
  relaxed.tolerance = std::max(options.tolerance, 1e-9);
  const CoreResult r = ipm_core(A1, sf.b, c1, u1, relaxed);
  return r.x.tail(2 * m).sum();
}

}  // namespace

LpResult solve_lp(const LpProblem& problem, const IpmOptions& options) {
  LpResult result;
  const StandardForm sf = to_standard_form(problem);
  if (sf.trivially_infeasible) {
    result.status = LpStatus::infeasible;
    return result;
  }

  CoreResult core;
  if (sf.A.cols() > 0 && sf.A.rows() > 0) {
    core = ipm_core(sf.A, sf.b, sf.c, sf.u, options);
    if (core.status != CoreStatus::converged) {
      CoreResult retry = ipm_core(sf.A, sf.b, sf.c, sf.u, options, true);
      if (retry.status == CoreStatus::converged) core = std::move(retry);
    }
  } else {
    // Only bounds remain: each column sits at the cheaper end.
    core.status = CoreStatus::converged;
    core.x = Vec::Zero(sf.A.cols());
    core.y = Vec::Zero(sf.A.rows());
    for (Eigen::Index j = 0; j < sf.A.cols(); ++j) {
      if (sf.c[j] < 0.0) {
        if (!std::isfinite(sf.u[j])) core.status = CoreStatus::diverged;
        else core.x[j] = sf.u[j];
      }
    }
    if (core.status == CoreStatus::diverged) {
      result.status = LpStatus::unbounded;
      return result;
    }
  }

  if (core.status != CoreStatus::converged) {
    const double violation = phase_one_violation(sf, options);
    if (violation > 1e-6 * (1.0 + inf_norm(sf.b))) {
      result.status = LpStatus::infeasible;
      return result;
    }
    if (core.status == CoreStatus::diverged) {
      result.status = LpStatus::unbounded;
      return result;
    }
    std::ostringstream os;
    os << "interior point method stalled after " << core.iterations
       << " iterations: relative primal residual " << core.primal << ", dual residual "
       << core.dual << ", gap " << core.gap;
    throw SolverError(os.str());
  }

  result.status = LpStatus::optimal;
  result.iterations = core.iterations;
  result.relative_gap = core.gap;
  result.x.resize(static_cast<std::size_t>(problem.num_variables()));
  for (int j = 0; j < problem.num_variables(); ++j) {
    const int col = sf.column_of_var[j];
    double value = sf.fixed_value[j];
    if (col >= 0) value += core.x[col];
    // Interior iterates sit strictly inside the bounds; snap the rest.
    value = std::max(value, problem.lower()[j]);
    value = std::min(value, problem.upper()[j]);
    result.x[j] = value;
  }
  result.row_duals.assign(problem.rows().size(), 0.0);
  for (std::size_t r = 0; r < problem.rows().size(); ++r)
    if (sf.std_row_of_row[r] >= 0 && core.y.size() > 0) result.row_duals[r] = core.y[sf.std_row_of_row[r]];
  result.objective = problem.objective_value(result.x);
  result.primal_residual = problem.max_violation(result.x);
  return result;
}

}  // namespace scplan
