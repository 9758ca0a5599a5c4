#include "wdn/nlp_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "wdn/hydraulics.hpp"

namespace wdn {

std::string_view to_string(ConstraintFamily family) {
  switch (family) {
    case ConstraintFamily::kConservation: return "conservation";
    case ConstraintFamily::kSegmentSum: return "segment_sum";
    case ConstraintFamily::kCycle: return "cycle";
    case ConstraintFamily::kHead: return "head";
    case ConstraintFamily::kComplementarity: return "complementarity";
  }
  return "unknown";
}

std::string_view to_string(Formulation formulation) {
  return formulation == Formulation::kDiscreteSegment ? "ds" : "pl";
}

NlpModel::NlpModel(Formulation formulation, VariableLayout layout, std::vector<Variable> variables,
                   std::vector<double> objective, std::vector<Constraint> constraints,
                   double smoothing_epsilon, std::string network_name)
    : formulation_(formulation),
      layout_(layout),
      variables_(std::move(variables)),
      objective_(std::move(objective)),
      constraints_(std::move(constraints)),
      smoothing_epsilon_(smoothing_epsilon),
      network_name_(std::move(network_name)) {
  // Jacobian pattern: sorted unique variables per row.
  jac_row_begin_.push_back(0);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> hess_index;
  auto hess_slot = [&](std::size_t a, std::size_t b) {
    auto key = std::minmax(a, b);
    auto [it, inserted] = hess_index.emplace(std::make_pair(key.second, key.first), 0);
    return &it->second;
  };
  // First pass: collect Hessian keys so positions can be assigned in sorted order.
  for (const Constraint& c : constraints_) {
    for (const HeadlossTerm& t : c.headloss) {
      hess_slot(t.flow_var, t.flow_var);
      hess_slot(t.flow_var, t.length_var);
    }
    for (const BilinearTerm& t : c.bilinear) hess_slot(t.first, t.second);
  }
  std::size_t pos = 0;
  for (auto& [key, slot] : hess_index) {
    slot = pos++;
    hess_structure_.push_back(key);
  }
  auto hess_pos = [&](std::size_t a, std::size_t b) {
    auto key = std::minmax(a, b);
    return hess_index.at({key.second, key.first});
  };

  slots_.resize(constraints_.size());
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const Constraint& c = constraints_[i];
    std::vector<std::size_t> vars;
    for (const auto& t : c.linear) vars.push_back(t.var);
    for (const auto& t : c.headloss) {
      vars.push_back(t.length_var);
      vars.push_back(t.flow_var);
    }
    for (const auto& t : c.bilinear) {
      vars.push_back(t.first);
      vars.push_back(t.second);
    }
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    std::size_t base = jac_structure_.size();
    for (std::size_t v : vars) jac_structure_.emplace_back(i, v);
    jac_row_begin_.push_back(jac_structure_.size());
    auto jpos = [&](std::size_t v) {
      return base + static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), v) -
                                             vars.begin());
    };
    TermSlots& s = slots_[i];
    for (const auto& t : c.linear) s.linear.push_back(jpos(t.var));
    for (const auto& t : c.headloss) {
      s.headloss.emplace_back(jpos(t.length_var), jpos(t.flow_var));
      s.hess_headloss_qq.push_back(hess_pos(t.flow_var, t.flow_var));
      s.hess_headloss_ql.push_back(hess_pos(t.flow_var, t.length_var));
    }
    for (const auto& t : c.bilinear) {
      s.bilinear.emplace_back(jpos(t.first), jpos(t.second));
      s.hess_bilinear.push_back(hess_pos(t.first, t.second));
    }
  }
}

double NlpModel::objective_value(std::span<const double> x) const {
  double f = 0.0;
  for (std::size_t j = 0; j < objective_.size(); ++j) f += objective_[j] * x[j];
  return f;
}

double NlpModel::residual(std::size_t i, std::span<const double> x) const {
  const Constraint& c = constraints_[i];
  double g = 0.0;
  for (const auto& t : c.linear) g += t.coef * x[t.var];
  for (const auto& t : c.headloss) {
    g += t.coef * x[t.length_var] * smoothed_flow_power(x[t.flow_var], smoothing_epsilon_).value;
  }
  for (const auto& t : c.bilinear) g += t.coef * x[t.first] * x[t.second];
  return g;
}

void NlpModel::residuals(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < constraints_.size(); ++i) out[i] = residual(i, x);
}

double NlpModel::violation(std::size_t i, std::span<const double> x) const {
  double g = residual(i, x);
  const Constraint& c = constraints_[i];
  if (g < c.lower) return c.lower - g;
  if (g > c.upper) return g - c.upper;
  return 0.0;
}

void NlpModel::jacobian(std::span<const double> x, std::span<double> values) const {
  std::fill(values.begin(), values.end(), 0.0);
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const Constraint& c = constraints_[i];
    const TermSlots& s = slots_[i];
    for (std::size_t k = 0; k < c.linear.size(); ++k) values[s.linear[k]] += c.linear[k].coef;
    for (std::size_t k = 0; k < c.headloss.size(); ++k) {
      const auto& t = c.headloss[k];
      FlowPower p = smoothed_flow_power(x[t.flow_var], smoothing_epsilon_);
      values[s.headloss[k].first] += t.coef * p.value;
      values[s.headloss[k].second] += t.coef * x[t.length_var] * p.d1;
    }
    for (std::size_t k = 0; k < c.bilinear.size(); ++k) {
      const auto& t = c.bilinear[k];
      values[s.bilinear[k].first] += t.coef * x[t.second];
      values[s.bilinear[k].second] += t.coef * x[t.first];
    }
  }
}

void NlpModel::add_gradient(std::size_t i, std::span<const double> x, double weight,
                            std::span<double> dense) const {
  const Constraint& c = constraints_[i];
  for (const auto& t : c.linear) dense[t.var] += weight * t.coef;
  for (const auto& t : c.headloss) {
    FlowPower p = smoothed_flow_power(x[t.flow_var], smoothing_epsilon_);
    dense[t.length_var] += weight * t.coef * p.value;
    dense[t.flow_var] += weight * t.coef * x[t.length_var] * p.d1;
  }
  for (const auto& t : c.bilinear) {
    dense[t.first] += weight * t.coef * x[t.second];
    dense[t.second] += weight * t.coef * x[t.first];
  }
}

void NlpModel::hessian(std::span<const double> x, std::span<const double> lambda,
                       std::span<double> values) const {
  std::fill(values.begin(), values.end(), 0.0);
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    if (lambda[i] == 0.0) continue;
    const Constraint& c = constraints_[i];
    const TermSlots& s = slots_[i];
    for (std::size_t k = 0; k < c.headloss.size(); ++k) {
      const auto& t = c.headloss[k];
      FlowPower p = smoothed_flow_power(x[t.flow_var], smoothing_epsilon_);
      values[s.hess_headloss_qq[k]] += lambda[i] * t.coef * x[t.length_var] * p.d2;
      values[s.hess_headloss_ql[k]] += lambda[i] * t.coef * p.d1;
    }
    for (std::size_t k = 0; k < c.bilinear.size(); ++k) {
      const auto& t = c.bilinear[k];
      values[s.hess_bilinear[k]] += lambda[i] * t.coef * (t.first == t.second ? 2.0 : 1.0);
    }
  }
}

void NlpModel::add_constraint_hessian(std::size_t i, std::span<const double> x, double lambda,
                                      std::span<double> dense) const {
  const std::size_t n = variables_.size();
  const Constraint& c = constraints_[i];
  for (const auto& t : c.headloss) {
    FlowPower p = smoothed_flow_power(x[t.flow_var], smoothing_epsilon_);
    dense[t.flow_var * n + t.flow_var] += lambda * t.coef * x[t.length_var] * p.d2;
    double cross = lambda * t.coef * p.d1;
    dense[t.flow_var * n + t.length_var] += cross;
    dense[t.length_var * n + t.flow_var] += cross;
  }
  for (const auto& t : c.bilinear) {
    dense[t.first * n + t.second] += lambda * t.coef;
    dense[t.second * n + t.first] += lambda * t.coef;
  }
}

std::vector<double> NlpModel::initial_point() const {
  std::vector<double> x(variables_.size());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = variables_[j].initial;
  return x;
}

}  // namespace wdn
