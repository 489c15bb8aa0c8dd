#include "csma/functions.hpp"

#include <cmath>
#include <stdexcept>

namespace csma {

Utility Utility::log_utility() { return Utility{}; }

Utility Utility::alpha_fair(double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0)
    throw std::invalid_argument("alpha-fair utility needs alpha > 0, alpha != 1");
  Utility u;
  u.kind_ = Kind::alpha;
  u.alpha_ = alpha;
  return u;
}

double Utility::value(double x) const {
  if (kind_ == Kind::log) return std::log(x);
  return std::pow(x, 1.0 - alpha_) / (1.0 - alpha_);
}

double Utility::deriv(double x) const {
  if (kind_ == Kind::log) return 1.0 / x;
  return std::pow(x, -alpha_);
}

double Utility::deriv_inv(double y) const {
  if (kind_ == Kind::log) return 1.0 / y;
  return std::pow(y, -1.0 / alpha_);
}

double Utility::deriv_at_one() const { return 1.0; }

bool Utility::diverges_at_zero() const {
  return kind_ == Kind::log || alpha_ > 1.0;
}

Utility Utility::from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "log") return log_utility();
  if (kind == "alpha_fair") return alpha_fair(j.at("alpha").get<double>());
  throw std::invalid_argument("unknown utility kind: " + kind);
}

nlohmann::json Utility::to_json() const {
  if (kind_ == Kind::log) return {{"kind", "log"}};
  return {{"kind", "alpha_fair"}, {"alpha", alpha_}};
}

WeightFunction WeightFunction::linear(double scale) {
  if (!(scale > 0.0))
    throw std::invalid_argument("weight function scale must be positive");
  WeightFunction w;
  w.kind_ = Kind::linear;
  w.scale_ = scale;
  return w;
}

WeightFunction WeightFunction::log1p(double scale) {
  if (!(scale > 0.0))
    throw std::invalid_argument("weight function scale must be positive");
  WeightFunction w;
  w.kind_ = Kind::log1p;
  w.scale_ = scale;
  return w;
}

double WeightFunction::value(double x) const {
  return kind_ == Kind::linear ? scale_ * x : scale_ * std::log1p(x);
}

double WeightFunction::deriv(double x) const {
  return kind_ == Kind::linear ? scale_ : scale_ / (1.0 + x);
}

double WeightFunction::inverse(double y) const {
  return kind_ == Kind::linear ? y / scale_ : std::expm1(y / scale_);
}

WeightFunction WeightFunction::from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const double scale = j.value("scale", 1.0);
  if (kind == "linear") return linear(scale);
  if (kind == "log1p") return log1p(scale);
  throw std::invalid_argument("unknown weight function kind: " + kind);
}

nlohmann::json WeightFunction::to_json() const {
  return {{"kind", kind_ == Kind::linear ? "linear" : "log1p"},
          {"scale", scale_}};
}

StepSchedule StepSchedule::constant(double b0) {
  if (!(b0 > 0.0)) throw std::invalid_argument("step size must be positive");
  StepSchedule s;
  s.kind_ = Kind::constant;
  s.b0_ = b0;
  return s;
}

StepSchedule StepSchedule::power(double b0, double t0, double exponent) {
  if (!(b0 > 0.0)) throw std::invalid_argument("step size must be positive");
  if (!(t0 >= 0.0)) throw std::invalid_argument("step offset must be >= 0");
  if (!(exponent > 0.5 && exponent <= 1.0))
    throw std::invalid_argument(
        "power step exponent must lie in (1/2, 1] for convergence");
  StepSchedule s;
  s.kind_ = Kind::power;
  s.b0_ = b0;
  s.t0_ = t0;
  s.exponent_ = exponent;
  return s;
}

double StepSchedule::at(std::uint64_t t) const {
  if (kind_ == Kind::constant) return b0_;
  return b0_ / std::pow(t0_ + static_cast<double>(t), exponent_);
}

StepSchedule StepSchedule::from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "constant") return constant(j.at("b0").get<double>());
  if (kind == "power")
    return power(j.at("b0").get<double>(), j.value("t0", 0.0),
                 j.value("p", 1.0));
  throw std::invalid_argument("unknown step schedule kind: " + kind);
}

nlohmann::json StepSchedule::to_json() const {
  if (kind_ == Kind::constant) return {{"kind", "constant"}, {"b0", b0_}};
  return {{"kind", "power"}, {"b0", b0_}, {"t0", t0_}, {"p", exponent_}};
}

}  // namespace csma
