#pragma once

#include <cstdint>

#include <json.hpp>

namespace csma {

/// Increasing, strictly concave objective applied per link. The solver and
/// queue update need U, U' and the inverse of U'.
class Utility {
 public:
  static Utility log_utility();
  /// x^(1-alpha) / (1-alpha), alpha > 0, alpha != 1.
  static Utility alpha_fair(double alpha);

  double value(double x) const;
  double deriv(double x) const;
  double deriv_inv(double y) const;
  double deriv_at_one() const;
  /// True when value(0) is -inf, i.e. starvation has unbounded cost.
  bool diverges_at_zero() const;
  bool is_log() const { return kind_ == Kind::log; }

  static Utility from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  enum class Kind { log, alpha } kind_ = Kind::log;
  double alpha_ = 1.0;
};

/// Strictly increasing, continuously differentiable map from queue level to
/// the CSMA exponent.
class WeightFunction {
 public:
  static WeightFunction linear(double scale = 1.0);    // w(x) = scale * x
  static WeightFunction log1p(double scale = 1.0);     // w(x) = scale * ln(1+x)

  double value(double x) const;
  double deriv(double x) const;
  double inverse(double y) const;

  static WeightFunction from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  enum class Kind { linear, log1p } kind_ = Kind::linear;
  double scale_ = 1.0;
};

/// Per-slot step sizes b[t]. Constant steps, or b0/(t0+t)^p with
/// p in (1/2, 1] so that sum b = inf and sum b^2 < inf.
class StepSchedule {
 public:
  static StepSchedule constant(double b0);
  static StepSchedule power(double b0, double t0, double exponent);

  double at(std::uint64_t t) const;
  bool diminishing() const { return kind_ == Kind::power; }

  static StepSchedule from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  enum class Kind { constant, power } kind_ = Kind::constant;
  double b0_ = 0.001;
  double t0_ = 0.0;
  double exponent_ = 1.0;
};

}  // namespace csma
