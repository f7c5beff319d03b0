// Copyright 2026 The uebcbf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "uebcbf/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uebcbf/errors.hpp"

namespace uebcbf {

std::string to_string(QpStatus status) {
  return status == QpStatus::kOptimal ? "optimal" : "infeasible";
}

namespace {

constexpr int kIterationCap = 500;
constexpr double kVacuousNorm = 1e-12;

// All constraints (rows and box) as c_i(u) = a_i u - b_i >= 0.
struct Combined {
  Mat a;  // one constraint per row
  Vec b;
  std::vector<bool> enabled;
};

Combined combine(const QpProblem& p) {
  const int m = p.dim();
  const int r = static_cast<int>(p.rows.size());
  Combined c{Mat::Zero(r + 2 * m, m), Vec::Zero(r + 2 * m),
             std::vector<bool>(r + 2 * m, true)};
  for (int i = 0; i < r; ++i) {
    c.a.row(i) = p.rows[i].a;
    c.b[i] = p.rows[i].b;
  }
  for (int j = 0; j < m; ++j) {
    c.a(r + j, j) = 1.0;
    c.b[r + j] = p.lower[j];
    c.a(r + m + j, j) = -1.0;
    c.b[r + m + j] = -p.upper[j];
  }
  return c;
}

void validate(const QpProblem& p) {
  const int m = p.dim();
  if (m < 1) throw std::invalid_argument("solve_qp: empty decision vector");
  if (p.lower.size() != m || p.upper.size() != m) {
    throw std::invalid_argument("solve_qp: box size mismatch");
  }
  if (!(p.lower.array() < p.upper.array()).all()) {
    throw std::invalid_argument("solve_qp: lower < upper required");
  }
  if (!p.u_des.allFinite()) throw NumericalError("solve_qp: non-finite u_des");
  for (const auto& row : p.rows) {
    if (row.a.size() != m) throw std::invalid_argument("solve_qp: row size");
    if (!row.a.allFinite() || !std::isfinite(row.b)) {
      throw NumericalError("solve_qp: non-finite constraint row");
    }
  }
}

QpSolution infeasible_single(int index, int total) {
  QpSolution s;
  s.status = QpStatus::kInfeasible;
  s.certificate = Vec::Zero(total);
  s.certificate[index] = 1.0;
  return s;
}

}  // namespace

double kkt_residual(const QpProblem& problem, const Vec& u,
                    const Vec& multipliers) {
  const Combined c = combine(problem);
  const Vec slack = c.a * u - c.b;
  const Vec stationarity =
      (u - problem.u_des) - 0.5 * c.a.transpose() * multipliers;
  double res = stationarity.cwiseAbs().maxCoeff();
  for (int i = 0; i < slack.size(); ++i) {
    res = std::max(res, -slack[i]);
    res = std::max(res, -multipliers[i]);
    res = std::max(res, std::abs(multipliers[i] * slack[i]));
  }
  return std::max(res, 0.0);
}

QpSolution solve_qp(const QpProblem& problem) {
  validate(problem);
  const int m = problem.dim();
  Combined c = combine(problem);
  const int total = static_cast<int>(c.b.size());

  for (int i = 0; i < static_cast<int>(problem.rows.size()); ++i) {
    if (c.a.row(i).norm() < kVacuousNorm) {
      if (c.b[i] > 0.0) return infeasible_single(i, total);
      c.enabled[i] = false;
    }
  }

  // Per-row tolerance in distance units, relative to the row's own size.
  const double u_scale =
      std::max({1.0, problem.u_des.cwiseAbs().maxCoeff(),
                problem.lower.cwiseAbs().maxCoeff(),
                problem.upper.cwiseAbs().maxCoeff()});
  Vec row_norm(total), row_tol(total);
  for (int i = 0; i < total; ++i) {
    row_norm[i] = c.a.row(i).norm();
    row_tol[i] = 1e-12 * (u_scale + std::abs(c.b[i]) / std::max(row_norm[i], 1e-300));
  }

  // Objective 1/2 |u - u_des|^2 has identity Hessian, so the unconstrained
  // minimizer is u_des and primal steps are projections onto the null space
  // of the active normals.
  Vec u = problem.u_des;
  std::vector<int> active;
  std::vector<double> lambda;  // multipliers of 1/2 |u - u_des|^2
  int iterations = 0;

  auto normals = [&]() {
    Mat n(m, static_cast<int>(active.size()));
    for (int k = 0; k < static_cast<int>(active.size()); ++k) {
      n.col(k) = c.a.row(active[k]).transpose();
    }
    return n;
  };

  while (true) {
    // Most violated inactive constraint, measured in distance units.
    int p = -1;
    double worst = 0.0;
    for (int i = 0; i < total; ++i) {
      if (!c.enabled[i]) continue;
      if (std::find(active.begin(), active.end(), i) != active.end()) continue;
      const double s = (c.a.row(i).dot(u) - c.b[i]) / row_norm[i];
      if (s < -row_tol[i] && s < worst) {
        worst = s;
        p = i;
      }
    }
    if (p < 0) break;

    double lambda_p = 0.0;
    while (true) {
      if (++iterations > kIterationCap) {
        throw SolverStalled("solve_qp: iteration cap exceeded");
      }
      const Vec np = c.a.row(p).transpose();
      const Mat nmat = normals();
      Vec r = Vec::Zero(static_cast<int>(active.size()));
      Vec z = np;
      if (!active.empty()) {
        r = nmat.colPivHouseholderQr().solve(np);
        z = np - nmat * r;
      }
      // With m independent normals active the null space is trivial; the
      // residual above is then pure roundoff.
      const bool z_zero = static_cast<int>(active.size()) >= m ||
                          z.norm() <= 1e-9 * np.norm();
      // Partial step: largest dual step before an active multiplier hits 0.
      double t1 = std::numeric_limits<double>::infinity();
      int drop = -1;
      for (int k = 0; k < static_cast<int>(active.size()); ++k) {
        if (r[k] > 1e-14) {
          const double ratio = lambda[k] / r[k];
          if (ratio < t1) {
            t1 = ratio;
            drop = k;
          }
        }
      }
      // Full step: makes constraint p active.
      double t2 = std::numeric_limits<double>::infinity();
      const double zz = z.dot(np);
      if (!z_zero && zz > 0.0) {
        t2 = -(np.dot(u) - c.b[p]) / zz;
      }

      if (!std::isfinite(t1) && !std::isfinite(t2)) {
        // np = N r with r <= 0: Farkas certificate.
        QpSolution s;
        s.status = QpStatus::kInfeasible;
        s.iterations = iterations;
        s.certificate = Vec::Zero(total);
        s.certificate[p] = 1.0;
        for (int k = 0; k < static_cast<int>(active.size()); ++k) {
          s.certificate[active[k]] = std::max(0.0, -r[k]);
        }
        s.certificate_margin = s.certificate.dot(c.b);
        return s;
      }

      const double t = std::min(t1, t2);
      if (!z_zero) u += t * z;
      for (int k = 0; k < static_cast<int>(active.size()); ++k) {
        lambda[k] -= t * r[k];
      }
      lambda_p += t;

      if (t2 <= t1) {
        active.push_back(p);
        lambda.push_back(lambda_p);
        break;
      }
      active.erase(active.begin() + drop);
      lambda.erase(lambda.begin() + drop);
    }
  }

  QpSolution s;
  s.status = QpStatus::kOptimal;
  s.iterations = iterations;
  s.u = u.cwiseMax(problem.lower).cwiseMin(problem.upper);
  for (int i = 0; i < total; ++i) {
    if (!c.enabled[i]) continue;
    const double slack = (c.a.row(i).dot(s.u) - c.b[i]) / row_norm[i];
    if (slack < -1e3 * row_tol[i] - 1e-9) {
      throw SolverStalled("solve_qp: lost feasibility to roundoff");
    }
  }
  s.active_set = active;
  std::sort(s.active_set.begin(), s.active_set.end());
  s.multipliers = Vec::Zero(total);
  for (int k = 0; k < static_cast<int>(active.size()); ++k) {
    s.multipliers[active[k]] = 2.0 * std::max(0.0, lambda[k]);
  }
  s.kkt_residual = kkt_residual(problem, s.u, s.multipliers);
  return s;
}

OracleResult qp_brute_oracle(const QpProblem& problem, int grid_points) {
  const int m = problem.dim();
  if (m > 2) throw UnsupportedError("qp_brute_oracle supports m <= 2 only");
  if (grid_points < 2) throw std::invalid_argument("grid_points must be >= 2");
  OracleResult best;
  const Vec span = problem.upper - problem.lower;
  best.resolution = span.maxCoeff() / (grid_points - 1);
  double best_dist = std::numeric_limits<double>::infinity();
  const int outer = m == 2 ? grid_points : 1;
  Vec u(m);
  for (int i = 0; i < grid_points; ++i) {
    u[0] = problem.lower[0] + span[0] * i / (grid_points - 1);
    for (int j = 0; j < outer; ++j) {
      if (m == 2) u[1] = problem.lower[1] + span[1] * j / (grid_points - 1);
      bool ok = true;
      for (const auto& row : problem.rows) {
        if (row.a.dot(u) < row.b) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      const double dist = (u - problem.u_des).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best.u = u;
        best.feasible = true;
      }
    }
  }
  return best;
}

}  // namespace uebcbf
