#pragma once

#include "wdn/network.hpp"

namespace wdn {

/// Hazen-Williams constants. The exponents are fixed; only omega depends on
/// the unit system.
struct HeadlossParams {
  static constexpr double kFlowExponent = 1.852;
  static constexpr double kDiameterExponent = 4.87;
  double omega = kDefaultHwConstant;
};

inline constexpr double kDefaultSmoothingEpsilon = 1e-6;  // m^3/s

/// omega * l / (R^1.852 * d^4.87): headloss per unit of q^1.852.
double resistance(double length, double diameter, double roughness, const HeadlossParams& params);

/// Hazen-Williams headloss for a nonnegative flow. Throws DomainError if q < 0.
double headloss(double q, double length, double diameter, double roughness,
                const HeadlossParams& params);
double headloss_dq(double q, double length, double diameter, double roughness,
                   const HeadlossParams& params);
double headloss_dlength(double q, double diameter, double roughness, const HeadlossParams& params);

/// sign(q) * headloss(|q|). Odd and C^1, with zero slope at q = 0.
double signed_headloss(double q, double length, double diameter, double roughness,
                       const HeadlossParams& params);
double signed_headloss_dq(double q, double length, double diameter, double roughness,
                          const HeadlossParams& params);

/// signed_headloss with |q| <= epsilon replaced by an odd quintic that matches
/// value, slope and curvature at +-epsilon, so the result is C^2.
double signed_headloss_smoothed(double q, double epsilon, double length, double diameter,
                                double roughness, const HeadlossParams& params);

/// Value and first two derivatives of a scalar function of flow.
struct FlowPower {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// q |q|^0.852 (second derivative is unbounded at 0; returned as 0 there).
FlowPower flow_power(double q);
/// The smoothed flow power used by every formulation; epsilon > 0.
FlowPower smoothed_flow_power(double q, double epsilon);

}  // namespace wdn
