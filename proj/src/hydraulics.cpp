#include "wdn/hydraulics.hpp"

#include <cmath>

#include "wdn/errors.hpp"

namespace wdn {

namespace {

constexpr double kN = HeadlossParams::kFlowExponent;

// Coefficients of the blend eps^n (a t + b t^3 + c t^5), t = q / eps, fixed by
// matching value, first and second derivative of t^n at t = 1.
constexpr double kBlendC = (kN - 1.0) * (kN - 3.0) / 8.0;
constexpr double kBlendB = (kN - 1.0) / 2.0 - 2.0 * kBlendC;
constexpr double kBlendA = 1.0 - kBlendB - kBlendC;

}  // namespace

double resistance(double length, double diameter, double roughness, const HeadlossParams& params) {
  return params.omega * length /
         (std::pow(roughness, kN) * std::pow(diameter, HeadlossParams::kDiameterExponent));
}

double headloss(double q, double length, double diameter, double roughness,
                const HeadlossParams& params) {
  if (q < 0.0) throw DomainError("headloss requires q >= 0; use signed_headloss");
  return resistance(length, diameter, roughness, params) * std::pow(q, kN);
}

double headloss_dq(double q, double length, double diameter, double roughness,
                   const HeadlossParams& params) {
  if (q < 0.0) throw DomainError("headloss requires q >= 0; use signed_headloss");
  return resistance(length, diameter, roughness, params) * kN * std::pow(q, kN - 1.0);
}

double headloss_dlength(double q, double diameter, double roughness, const HeadlossParams& params) {
  if (q < 0.0) throw DomainError("headloss requires q >= 0; use signed_headloss");
  return resistance(1.0, diameter, roughness, params) * std::pow(q, kN);
}

double signed_headloss(double q, double length, double diameter, double roughness,
                       const HeadlossParams& params) {
  return resistance(length, diameter, roughness, params) * flow_power(q).value;
}

double signed_headloss_dq(double q, double length, double diameter, double roughness,
                          const HeadlossParams& params) {
  return resistance(length, diameter, roughness, params) * flow_power(q).d1;
}

double signed_headloss_smoothed(double q, double epsilon, double length, double diameter,
                                double roughness, const HeadlossParams& params) {
  return resistance(length, diameter, roughness, params) * smoothed_flow_power(q, epsilon).value;
}

FlowPower flow_power(double q) {
  double a = std::abs(q);
  if (a == 0.0) return {};
  double p = std::pow(a, kN - 1.0);  // |q|^0.852
  double s = q > 0.0 ? 1.0 : -1.0;
  return {q * p, kN * p, s * kN * (kN - 1.0) * p / a};
}

FlowPower smoothed_flow_power(double q, double epsilon) {
  if (std::abs(q) > epsilon) return flow_power(q);
  double t = q / epsilon;
  double t2 = t * t;
  double scale = std::pow(epsilon, kN);
  double value = scale * t * (kBlendA + t2 * (kBlendB + t2 * kBlendC));
  double d1 = scale / epsilon * (kBlendA + t2 * (3.0 * kBlendB + 5.0 * kBlendC * t2));
  double d2 = scale / (epsilon * epsilon) * t * (6.0 * kBlendB + 20.0 * kBlendC * t2);
  return {value, d1, d2};
}

}  // namespace wdn
