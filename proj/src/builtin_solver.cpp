#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "wdn/solver.hpp"

namespace wdn {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Variables are mapped to y in [0, 1] by their bound range. Conservation rows
// are kept satisfied exactly by the inner iteration; every other row is
// handled by the augmented Lagrangian, scaled to natural units (head over the
// largest available head drop, lengths over the link length, flows in
// hundredths of q_max). Segment sums stay in the penalty: a link built from a single pipe
// puts every variable of its row on a bound, which leaves the row's
// multiplier undetermined in the active-set iteration.
class Scaled {
 public:
  explicit Scaled(const NlpModel& model)
      : model_(model), n_(model.variable_count()), m_(model.constraint_count()) {
    lo_.resize(n_);
    range_.resize(n_);
    free_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      const Variable& v = model.variables()[j];
      lo_[j] = v.lower;
      range_[j] = v.upper - v.lower;
      free_[j] = range_[j] > 0.0;
      if (!free_[j]) range_[j] = 1.0;
    }
    double gmax = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (free_[j]) gmax = std::max(gmax, std::abs(model.objective()[j]) * range_[j]);
    }
    objective_scale_ = gmax > 0.0 ? 1.0 / gmax : 1.0;

    double head_scale = 1.0, flow_scale = 0.0;
    for (const Constraint& c : model.constraints()) {
      if (c.family == ConstraintFamily::kHead) head_scale = std::max(head_scale, c.upper);
    }
    const std::size_t flow_vars = (model.layout().split_flow ? 2 : 1) * model.layout().links;
    for (std::size_t j = 0; j < flow_vars; ++j) {
      flow_scale = std::max({flow_scale, std::abs(lo_[j]), std::abs(lo_[j] + range_[j])});
    }
    flow_scale = std::max(flow_scale, 1e-6);

    weight_.assign(m_, 1.0);
    std::vector<double> x0(n_, 0.0);
    std::vector<double> jac(model.jacobian_structure().size());
    model.jacobian(x0, jac);  // only the linear rows are read below
    for (std::size_t i = 0; i < m_; ++i) {
      const Constraint& c = model.constraint(i);
      switch (c.family) {
        case ConstraintFamily::kCycle:
        case ConstraintFamily::kHead: weight_[i] = 1.0 / head_scale; break;
        case ConstraintFamily::kComplementarity: weight_[i] = 1e2 / (flow_scale * flow_scale); break;
        case ConstraintFamily::kSegmentSum: weight_[i] = 1.0 / std::max(1.0, c.lower); break;
        default: break;
      }
      if (c.family == ConstraintFamily::kConservation) {
        linear_rows_.push_back(i);
      } else {
        penalized_rows_.push_back(i);
      }
    }
    // Conservation rows in y: A y = b, rows normalized.
    a_ = MatrixXd::Zero(static_cast<Index>(linear_rows_.size()), static_cast<Index>(n_));
    b_ = VectorXd::Zero(static_cast<Index>(linear_rows_.size()));
    for (std::size_t r = 0; r < linear_rows_.size(); ++r) {
      std::size_t i = linear_rows_[r];
      double rhs = model.constraint(i).lower;
      for (std::size_t k = model.row_begin(i); k < model.row_begin(i + 1); ++k) {
        std::size_t j = model.jacobian_structure()[k].second;
        if (free_[j]) a_(static_cast<Index>(r), static_cast<Index>(j)) = jac[k] * range_[j];
        rhs -= jac[k] * lo_[j];
      }
      double norm = a_.row(static_cast<Index>(r)).cwiseAbs().maxCoeff();
      if (norm > 0.0) {
        a_.row(static_cast<Index>(r)) /= norm;
        rhs /= norm;
      }
      b_[static_cast<Index>(r)] = rhs;
    }
    lambda_.assign(m_, 0.0);
    residual_.resize(m_);
    shift_.assign(m_, 0.0);
    jac_.resize(model.jacobian_structure().size());
  }

  std::size_t n() const { return n_; }
  bool is_free(std::size_t j) const { return free_[j]; }
  const MatrixXd& a() const { return a_; }
  const VectorXd& b() const { return b_; }
  const NlpModel& model() const { return model_; }
  double weight(std::size_t i) const { return weight_[i]; }
  double range(std::size_t j) const { return range_[j]; }

  std::vector<double> to_x(const VectorXd& y) const {
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      x[j] = free_[j] ? lo_[j] + range_[j] * y[static_cast<Index>(j)] : lo_[j];
    }
    return x;
  }
  VectorXd to_y(std::span<const double> x) const {
    VectorXd y(static_cast<Index>(n_));
    for (std::size_t j = 0; j < n_; ++j) {
      y[static_cast<Index>(j)] = free_[j] ? std::clamp((x[j] - lo_[j]) / range_[j], 0.0, 1.0) : 0.0;
    }
    return y;
  }

  void set_penalty(double rho) { rho_ = rho; }

  /// Augmented Lagrangian over the penalized rows; caches the shifts.
  double value(const VectorXd& y) {
    auto x = to_x(y);
    double v = objective_scale_ * model_.objective_value(x);
    model_.residuals(x, residual_);
    for (std::size_t i : penalized_rows_) {
      const Constraint& c = model_.constraint(i);
      double t = weight_[i] * residual_[i] + lambda_[i] / rho_;
      shift_[i] = t - std::clamp(t, weight_[i] * c.lower, weight_[i] * c.upper);
      v += 0.5 * rho_ * shift_[i] * shift_[i] - lambda_[i] * lambda_[i] / (2.0 * rho_);
    }
    return v;
  }

  VectorXd gradient(const VectorXd& y) const {
    auto x = to_x(y);
    std::vector<double> g(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) g[j] = objective_scale_ * model_.objective()[j];
    for (std::size_t i : penalized_rows_) {
      if (shift_[i] != 0.0) model_.add_gradient(i, x, rho_ * shift_[i] * weight_[i], g);
    }
    VectorXd out(static_cast<Index>(n_));
    for (std::size_t j = 0; j < n_; ++j) out[static_cast<Index>(j)] = free_[j] ? g[j] * range_[j] : 0.0;
    return out;
  }

  /// Generalized Hessian in y.
  MatrixXd hessian(const VectorXd& y) {
    auto x = to_x(y);
    const auto n = static_cast<Index>(n_);
    MatrixXd h = MatrixXd::Zero(n, n);
    std::span<double> dense(h.data(), n_ * n_);
    model_.jacobian(x, jac_);
    const auto& structure = model_.jacobian_structure();
    for (std::size_t i : penalized_rows_) {
      if (shift_[i] == 0.0) continue;
      if (!model_.constraint(i).is_linear()) {
        model_.add_constraint_hessian(i, x, rho_ * shift_[i] * weight_[i], dense);
      }
      double c = rho_ * weight_[i] * weight_[i];
      for (std::size_t p = model_.row_begin(i); p < model_.row_begin(i + 1); ++p) {
        for (std::size_t q = model_.row_begin(i); q < model_.row_begin(i + 1); ++q) {
          h(static_cast<Index>(structure[p].second), static_cast<Index>(structure[q].second)) +=
              c * jac_[p] * jac_[q];
        }
      }
    }
    VectorXd r(n);
    for (std::size_t j = 0; j < n_; ++j) r[static_cast<Index>(j)] = free_[j] ? range_[j] : 0.0;
    return r.asDiagonal() * h * r.asDiagonal();
  }

  void update_multipliers() {
    for (std::size_t i : penalized_rows_) lambda_[i] = rho_ * shift_[i];
  }

  /// Largest scaled violation over penalized rows.
  double penalized_violation(const VectorXd& y) {
    auto x = to_x(y);
    model_.residuals(x, residual_);
    double scaled = 0.0;
    for (std::size_t i : penalized_rows_) {
      const Constraint& c = model_.constraint(i);
      double d = std::max({c.lower - residual_[i], residual_[i] - c.upper, 0.0});
      scaled = std::max(scaled, weight_[i] * d);
    }
    return scaled;
  }

  /// Largest natural violation over all rows.
  double violation(const VectorXd& y) const {
    auto x = to_x(y);
    double worst = 0.0;
    for (std::size_t i = 0; i < m_; ++i) worst = std::max(worst, model_.violation(i, x));
    return worst;
  }

 private:
  const NlpModel& model_;
  std::size_t n_, m_;
  std::vector<double> lo_, range_;
  std::vector<bool> free_;
  double objective_scale_ = 1.0;
  std::vector<double> weight_;
  std::vector<std::size_t> linear_rows_, penalized_rows_;
  MatrixXd a_;
  VectorXd b_;
  std::vector<double> lambda_, residual_, shift_, jac_;
  double rho_ = 10.0;
};

struct Smooth {
  std::function<double(const VectorXd&)> value;       // may cache state
  std::function<VectorXd(const VectorXd&)> gradient;  // at the last value() point
  std::function<MatrixXd(const VectorXd&)> hessian;   // at the last value() point
};

struct InnerResult {
  std::size_t iterations = 0;
  bool converged = false;
  bool numerical_failure = false;
  double stationarity = 0.0;
};

constexpr double kBoundSnap = 1e-12;

bool at_bound(double v) { return v <= kBoundSnap || v >= 1.0 - kBoundSnap; }

// Active-set Newton for min f(y) s.t. A y = b, 0 <= y <= 1, from a point
// satisfying the constraints. Steps live in the null space of A restricted
// to the free variables; a step is truncated at the first bound it meets,
// which then joins the active set; bound variables whose multiplier has the
// wrong sign are released.
InnerResult active_set_newton(const Smooth& f, const MatrixXd& a, const std::vector<bool>& movable,
                              VectorXd& y, double tolerance, std::size_t budget) {
  constexpr double kArmijo = 1e-4;
  const Index n = y.size();
  InnerResult out;
  double value = f.value(y);
  if (!std::isfinite(value)) {
    out.numerical_failure = true;
    return out;
  }
  auto columns = [&](const std::vector<Index>& set) {
    MatrixXd cols(a.rows(), static_cast<Index>(set.size()));
    for (std::size_t c = 0; c < set.size(); ++c) cols.col(static_cast<Index>(c)) = a.col(set[c]);
    return cols;
  };
  auto entries = [](const VectorXd& v, const std::vector<Index>& set) {
    VectorXd out_v(static_cast<Index>(set.size()));
    for (std::size_t c = 0; c < set.size(); ++c) out_v[static_cast<Index>(c)] = v[set[c]];
    return out_v;
  };

  while (true) {
    VectorXd g = f.gradient(y);
    if (!g.allFinite()) {
      out.numerical_failure = true;
      return out;
    }
    std::vector<Index> free_set, bound_set;
    for (Index j = 0; j < n; ++j) {
      if (!movable[static_cast<std::size_t>(j)]) continue;
      (at_bound(y[j]) ? bound_set : free_set).push_back(j);
    }

    // Equality multipliers from the free variables, then the reduced
    // gradient of every bound variable.
    VectorXd nu = VectorXd::Zero(a.rows());
    if (a.rows() > 0 && !free_set.empty()) {
      nu = columns(free_set).transpose().completeOrthogonalDecomposition().solve(-entries(g, free_set));
    }
    double worst_release = 0.0;
    std::vector<Index> release;
    for (Index j : bound_set) {
      double r = g[j] + (a.rows() > 0 ? a.col(j).dot(nu) : 0.0);
      double wrong = y[j] <= kBoundSnap ? -r : r;  // > 0: moving inward descends
      if (wrong > 0.0) {
        worst_release = std::max(worst_release, wrong);
        if (wrong > tolerance) release.push_back(j);
      }
    }

    std::vector<Index> face = free_set;
    face.insert(face.end(), release.begin(), release.end());
    VectorXd d = VectorXd::Zero(n);
    double reduced_norm = 0.0;
    MatrixXd h;
    for (int pass = 0; pass < 20 && !face.empty(); ++pass) {
      d.setZero();
      const auto k = static_cast<Index>(face.size());
      MatrixXd z;
      if (a.rows() == 0) {
        z = MatrixXd::Identity(k, k);
      } else {
        Eigen::ColPivHouseholderQR<MatrixXd> qr(columns(face).transpose());
        qr.setThreshold(1e-10);
        MatrixXd q = qr.householderQ();
        z = q.rightCols(k - qr.rank());
      }
      if (z.cols() == 0) break;
      VectorXd gf = entries(g, face);
      VectorXd gr = z.transpose() * gf;
      if (pass == 0) reduced_norm = gr.cwiseAbs().maxCoeff();
      if (h.size() == 0) h = f.hessian(y);
      MatrixXd hf(k, k);
      for (Index p = 0; p < k; ++p) {
        for (Index q = 0; q < k; ++q) {
          hf(p, q) = h(face[static_cast<std::size_t>(p)], face[static_cast<std::size_t>(q)]);
        }
      }
      MatrixXd hr = z.transpose() * hf * z;
      double diag = std::max(1e-12, hr.diagonal().cwiseAbs().maxCoeff());
      double tau = 0.0;
      VectorXd p;
      for (int attempt = 0; attempt < 60; ++attempt) {
        MatrixXd shifted = hr;
        shifted.diagonal().array() += tau;
        Eigen::LLT<MatrixXd> llt(shifted);
        if (llt.info() == Eigen::Success) {
          p = llt.solve(-gr);
          if (p.allFinite() && p.dot(gr) < 0.0) break;
        }
        p.resize(0);
        tau = tau == 0.0 ? 1e-10 * diag : tau * 4.0;
      }
      if (p.size() == 0) break;
      VectorXd df = z * p;
      // A released variable the step would push outward is fixed again.
      std::vector<Index> kept;
      for (Index c = 0; c < k; ++c) {
        Index j = face[static_cast<std::size_t>(c)];
        bool outward = (y[j] <= kBoundSnap && df[c] < 0.0) || (y[j] >= 1.0 - kBoundSnap && df[c] > 0.0);
        if (!outward) kept.push_back(j);
        d[j] = df[c];
      }
      if (kept.size() == face.size()) break;
      face = std::move(kept);
    }

    out.stationarity = std::max(reduced_norm, worst_release);
    if (reduced_norm <= tolerance && worst_release <= tolerance) {
      out.converged = true;
      return out;
    }
    if (out.iterations >= budget) return out;
    ++out.iterations;

    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      f.value(y);
      return out;  // no descent direction left
    }
    double alpha_max = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (d[j] < 0.0) alpha_max = std::min(alpha_max, y[j] / -d[j]);
      if (d[j] > 0.0) alpha_max = std::min(alpha_max, (1.0 - y[j]) / d[j]);
    }
    double alpha = std::min(1.0, alpha_max);
    bool moved = false;
    for (int trial = 0; trial < 60; ++trial, alpha *= 0.5) {
      VectorXd trial_y = y + alpha * d;
      if (alpha == alpha_max) {
        for (Index j = 0; j < n; ++j) {
          if (d[j] < 0.0 && y[j] / -d[j] <= alpha_max * (1.0 + 1e-9)) trial_y[j] = 0.0;
          if (d[j] > 0.0 && (1.0 - y[j]) / d[j] <= alpha_max * (1.0 + 1e-9)) trial_y[j] = 1.0;
        }
      }
      trial_y = trial_y.cwiseMax(0.0).cwiseMin(1.0);
      double trial_value = f.value(trial_y);
      if (std::isfinite(trial_value) && trial_value <= value + kArmijo * alpha * slope) {
        y = std::move(trial_y);
        value = trial_value;
        moved = true;
        break;
      }
    }
    if (!moved) {
      f.value(y);
      return out;  // stalled
    }
  }
}

// Min-norm Gauss-Newton corrections toward all equality rows and the active
// or violated inequality rows, moving only variables strictly inside their
// bounds.
void polish(Scaled& s, VectorXd& y, double tolerance) {
  const NlpModel& model = s.model();
  const std::size_t m = model.constraint_count();
  std::vector<double> residual(m);
  std::vector<double> jac(model.jacobian_structure().size());
  double worst = s.violation(y);
  for (int iteration = 0; iteration < 30 && worst > 1e-4 * tolerance; ++iteration) {
    auto x = s.to_x(y);
    model.residuals(x, residual);
    model.jacobian(x, jac);
    std::vector<std::size_t> rows;
    std::vector<double> error;
    for (std::size_t i = 0; i < m; ++i) {
      const Constraint& c = model.constraint(i);
      double target;
      if (c.is_equality() || residual[i] <= c.lower) {
        target = c.lower;
      } else if (residual[i] >= c.upper) {
        target = c.upper;
      } else if (residual[i] - c.lower <= tolerance || c.upper - residual[i] <= tolerance) {
        target = residual[i];  // nearly active: hold in place
      } else {
        continue;
      }
      rows.push_back(i);
      error.push_back(s.weight(i) * (residual[i] - target));
    }
    std::vector<Index> column(s.n(), -1);
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < s.n(); ++j) {
      if (s.is_free(j) && !at_bound(y[static_cast<Index>(j)])) {
        column[j] = static_cast<Index>(cols.size());
        cols.push_back(j);
      }
    }
    if (rows.empty() || cols.empty()) return;
    MatrixXd jm = MatrixXd::Zero(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::size_t i = rows[r];
      for (std::size_t k = model.row_begin(i); k < model.row_begin(i + 1); ++k) {
        std::size_t var = model.jacobian_structure()[k].second;
        if (column[var] >= 0) jm(static_cast<Index>(r), column[var]) = s.weight(i) * jac[k] * s.range(var);
      }
    }
    VectorXd e = Eigen::Map<VectorXd>(error.data(), static_cast<Index>(error.size()));
    VectorXd step = jm.completeOrthogonalDecomposition().solve(-e);
    if (!step.allFinite()) return;
    VectorXd trial = y;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      Index jj = static_cast<Index>(cols[c]);
      trial[jj] = std::clamp(trial[jj] + step[static_cast<Index>(c)], 0.0, 1.0);
    }
    double trial_worst = s.violation(trial);
    if (!(trial_worst < worst)) return;
    y = std::move(trial);
    worst = trial_worst;
  }
}

// (forward, reverse) variable pairs of the complementarity rows.
std::vector<std::pair<std::size_t, std::size_t>> split_flow_pairs(const NlpModel& model) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& c : model.constraints()) {
    if (c.family != ConstraintFamily::kComplementarity) continue;
    for (const auto& t : c.bilinear) pairs.emplace_back(t.first, t.second);
  }
  return pairs;
}

bool split_flows_both_ways(const NlpModel& model, std::span<const double> x) {
  for (auto [f, r] : split_flow_pairs(model)) {
    if (std::min(x[f], x[r]) > 0.0) return true;
  }
  return false;
}

// Same net flow on every link, with the smaller direction set to zero.
std::vector<double> cancel_split_flows(const NlpModel& model, std::vector<double> x) {
  for (auto [f, r] : split_flow_pairs(model)) {
    const double common = std::min(x[f], x[r]);
    x[f] -= common;
    x[r] -= common;
  }
  return x;
}

// Phase 1: a point of the box meeting conservation, near `y`.
// Returns false if no such point exists.
bool linear_feasible_point(const Scaled& s, VectorXd& y, std::size_t& iterations, std::size_t budget) {
  const MatrixXd& a = s.a();
  const VectorXd& b = s.b();
  if (a.rows() == 0) return true;
  constexpr double kProximity = 1e-8;
  const VectorXd anchor = y;
  std::vector<bool> movable(s.n());
  for (std::size_t j = 0; j < s.n(); ++j) movable[j] = s.is_free(j);
  MatrixXd hessian = a.transpose() * a;
  hessian.diagonal().array() += kProximity;
  Smooth least_squares{
      [&](const VectorXd& v) {
        return 0.5 * (a * v - b).squaredNorm() + 0.5 * kProximity * (v - anchor).squaredNorm();
      },
      [&](const VectorXd& v) { return VectorXd(a.transpose() * (a * v - b) + kProximity * (v - anchor)); },
      [&](const VectorXd&) { return hessian; }};
  const MatrixXd none(0, y.size());
  iterations += active_set_newton(least_squares, none, movable, y, 1e-15, budget).iterations;

  // Remove what the proximity term leaves behind.
  for (int k = 0; k < 20; ++k) {
    VectorXd r = a * y - b;
    if (r.cwiseAbs().maxCoeff() <= 1e-14) break;
    std::vector<Index> cols;
    for (Index j = 0; j < y.size(); ++j) {
      if (movable[static_cast<std::size_t>(j)] && !at_bound(y[j])) cols.push_back(j);
    }
    if (cols.empty()) break;
    MatrixXd af(a.rows(), static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) af.col(static_cast<Index>(c)) = a.col(cols[c]);
    VectorXd step = af.completeOrthogonalDecomposition().solve(-r);
    VectorXd trial = y;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      trial[cols[c]] = std::clamp(trial[cols[c]] + step[static_cast<Index>(c)], 0.0, 1.0);
    }
    if ((a * trial - b).cwiseAbs().maxCoeff() >= r.cwiseAbs().maxCoeff()) break;
    y = trial;
  }
  return (a * y - b).cwiseAbs().maxCoeff() <= 1e-9;
}

}  // namespace

AdapterResult builtin_solve(const NlpModel& model, std::span<const double> start,
                            const SolverOptions& options) {
  constexpr double kMaxPenalty = 1e12;
  AdapterResult result;
  Scaled s(model);
  VectorXd y = s.to_y(start);

  bool lf = linear_feasible_point(s, y, result.iterations, options.max_iterations);
  if (!lf) {
    result.x = s.to_x(y);
    result.status = SolveStatus::kInfeasible;
    result.message = "flow conservation cannot be met within the flow bounds";
    return result;
  }

  std::vector<bool> movable(s.n());
  for (std::size_t j = 0; j < s.n(); ++j) movable[j] = s.is_free(j);
  Smooth al{[&](const VectorXd& v) { return s.value(v); },
            [&](const VectorXd& v) { return s.gradient(v); },
            [&](const VectorXd& v) { return s.hessian(v); }};

  double rho = 10.0;
  double omega = 1.0 / rho;          // inner stationarity target
  double eta = std::pow(rho, -0.1);  // violation target for multiplier updates
  const double final_omega = options.optimality_tolerance;

  while (true) {
    s.set_penalty(rho);
    std::size_t budget = options.max_iterations - std::min(options.max_iterations, result.iterations);
    InnerResult inner = active_set_newton(al, s.a(), movable, y, std::max(omega, final_omega), budget);
    result.iterations += inner.iterations;
    if (inner.numerical_failure) {
      result.status = SolveStatus::kNumericalFailure;
      result.message = "non-finite value in evaluators";
      result.x = s.to_x(y);
      return result;
    }
    double scaled = s.penalized_violation(y);
    if (inner.converged && omega <= final_omega && scaled <= 1e-2 * options.feasibility_tolerance) break;
    if (result.iterations >= options.max_iterations) {
      polish(s, y, options.feasibility_tolerance);
      result.x = s.to_x(y);
      result.status = SolveStatus::kIterationLimit;
      result.message = "iteration limit reached";
      return result;
    }
    if (scaled <= eta) {
      s.value(y);
      s.update_multipliers();
      eta = std::max(eta * std::pow(rho, -0.9), 1e-3 * options.feasibility_tolerance);
      omega = std::max(omega / rho, final_omega);
    } else {
      rho *= 10.0;
      if (rho > kMaxPenalty) {
        polish(s, y, options.feasibility_tolerance);
        result.x = s.to_x(y);
        bool feasible = s.violation(y) <= options.feasibility_tolerance;
        result.status = feasible ? SolveStatus::kNumericalFailure : SolveStatus::kInfeasible;
        result.message = feasible ? "penalty limit reached at a feasible point"
                                  : "constraints cannot be satisfied";
        return result;
      }
      eta = std::pow(rho, -0.1);
      omega = std::max(1.0 / rho, final_omega);
    }
  }

  polish(s, y, options.feasibility_tolerance);
  if (split_flows_both_ways(model, s.to_x(y))) {
    // Relaxed complementarity lets a link carry flow both ways, which the
    // headloss rows count differently from the net flow. Cancel the common
    // part and restore the nonlinear rows with the zeroed flows on their bound.
    VectorXd projected = s.to_y(cancel_split_flows(model, s.to_x(y)));
    polish(s, projected, options.feasibility_tolerance);
    if (s.violation(projected) <= options.feasibility_tolerance) y = std::move(projected);
  }
  result.x = s.to_x(y);
  double natural = s.violation(y);
  if (natural <= options.feasibility_tolerance) {
    result.status = SolveStatus::kLocalOptimum;
    result.message = "converged";
  } else {
    result.status = SolveStatus::kNumericalFailure;
    result.message = "stationary point violates constraints by " + std::to_string(natural);
  }
  return result;
}

AdapterResult BuiltinSolver::solve(const NlpModel& model, std::span<const double> start,
                                   const SolverOptions& options) const {
  return builtin_solve(model, start, options);
}

}  // namespace wdn
