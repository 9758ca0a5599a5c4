#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wdn {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class ConstraintFamily { kConservation, kSegmentSum, kCycle, kHead, kComplementarity };

std::string_view to_string(ConstraintFamily family);

struct LinearTerm {
  std::size_t var = 0;
  double coef = 0.0;
};

/// coef * x[length_var] * phi(x[flow_var]), phi being the smoothed flow power
/// q |q|^0.852.
struct HeadlossTerm {
  std::size_t length_var = 0;
  std::size_t flow_var = 0;
  double coef = 0.0;
};

/// coef * x[first] * x[second].
struct BilinearTerm {
  std::size_t first = 0;
  std::size_t second = 0;
  double coef = 0.0;
};

/// lower <= sum of terms <= upper; an equality when lower == upper.
struct Constraint {
  std::string name;
  ConstraintFamily family = ConstraintFamily::kConservation;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<LinearTerm> linear = {};
  std::vector<HeadlossTerm> headloss = {};
  std::vector<BilinearTerm> bilinear = {};

  bool is_equality() const { return lower == upper; }
  bool is_linear() const { return headloss.empty() && bilinear.empty(); }
};

struct Variable {
  std::string name;
  double lower = -kInfinity;
  double upper = kInfinity;
  double initial = 0.0;
};

enum class Formulation { kDiscreteSegment, kParallelLink };

std::string_view to_string(Formulation formulation);

/// Index map from (link, pipe) to the flat variable vector.
struct VariableLayout {
  std::size_t links = 0;
  std::size_t pipes = 0;
  bool split_flow = false;  // true for the parallel-link formulation

  std::size_t flow(std::size_t link) const { return link; }
  std::size_t forward(std::size_t link) const { return link; }
  std::size_t reverse(std::size_t link) const { return links + link; }
  std::size_t length(std::size_t link, std::size_t pipe) const {
    return (split_flow ? 2 : 1) * links + link * pipes + pipe;
  }
  std::size_t size() const { return (split_flow ? 2 : 1) * links + links * pipes; }
};

/// A smooth NLP with linear objective and structured constraints. All
/// evaluators are const and reentrant.
class NlpModel {
 public:
  NlpModel(Formulation formulation, VariableLayout layout, std::vector<Variable> variables,
           std::vector<double> objective, std::vector<Constraint> constraints,
           double smoothing_epsilon, std::string network_name);

  Formulation formulation() const { return formulation_; }
  const VariableLayout& layout() const { return layout_; }
  const std::string& network_name() const { return network_name_; }
  double smoothing_epsilon() const { return smoothing_epsilon_; }

  /// Per-link +1/-1 when the model has flow signs fixed; empty otherwise.
  std::span<const int> orientation() const { return orientation_; }
  void set_orientation(std::vector<int> orientation) { orientation_ = std::move(orientation); }
  double complementarity_delta() const { return complementarity_delta_; }
  void set_complementarity_delta(double delta) { complementarity_delta_ = delta; }

  std::size_t variable_count() const { return variables_.size(); }
  std::size_t constraint_count() const { return constraints_.size(); }
  std::span<const Variable> variables() const { return variables_; }
  std::span<const Constraint> constraints() const { return constraints_; }
  const Constraint& constraint(std::size_t i) const { return constraints_[i]; }
  /// Bounds may change; the sparsity structure may not.
  void set_constraint_bounds(std::size_t i, double lower, double upper) {
    constraints_[i].lower = lower;
    constraints_[i].upper = upper;
  }
  std::span<const double> objective() const { return objective_; }

  double objective_value(std::span<const double> x) const;

  double residual(std::size_t i, std::span<const double> x) const;
  void residuals(std::span<const double> x, std::span<double> out) const;
  /// Distance of residual i from [lower, upper].
  double violation(std::size_t i, std::span<const double> x) const;

  /// Jacobian nonzeros as (constraint, variable); fixed for the model's life.
  std::span<const std::pair<std::size_t, std::size_t>> jacobian_structure() const {
    return jac_structure_;
  }
  /// Entries of constraint i occupy [row_begin(i), row_begin(i + 1)).
  std::size_t row_begin(std::size_t i) const { return jac_row_begin_[i]; }
  void jacobian(std::span<const double> x, std::span<double> values) const;
  /// Adds the gradient of constraint i, scaled by `weight`, into a dense vector.
  void add_gradient(std::size_t i, std::span<const double> x, double weight,
                    std::span<double> dense) const;

  /// Lower-triangle (row >= col) nonzeros of sum_i lambda_i * Hess g_i.
  std::span<const std::pair<std::size_t, std::size_t>> hessian_structure() const {
    return hess_structure_;
  }
  void hessian(std::span<const double> x, std::span<const double> lambda,
               std::span<double> values) const;

  /// Adds lambda * Hess g_i into a dense column-major n x n buffer (both
  /// triangles).
  void add_constraint_hessian(std::size_t i, std::span<const double> x, double lambda,
                              std::span<double> dense) const;

  std::vector<double> initial_point() const;

 private:
  struct TermSlots {
    std::vector<std::size_t> linear;                         // jacobian position
    std::vector<std::pair<std::size_t, std::size_t>> headloss;  // (length pos, flow pos)
    std::vector<std::pair<std::size_t, std::size_t>> bilinear;  // (first pos, second pos)
    std::vector<std::size_t> hess_headloss_qq, hess_headloss_ql, hess_bilinear;
  };

  Formulation formulation_;
  VariableLayout layout_;
  std::vector<Variable> variables_;
  std::vector<double> objective_;
  std::vector<Constraint> constraints_;
  double smoothing_epsilon_;
  std::string network_name_;
  std::vector<int> orientation_;
  double complementarity_delta_ = 0.0;

  std::vector<std::pair<std::size_t, std::size_t>> jac_structure_;
  std::vector<std::size_t> jac_row_begin_;
  std::vector<std::pair<std::size_t, std::size_t>> hess_structure_;
  std::vector<TermSlots> slots_;
};

}  // namespace wdn
