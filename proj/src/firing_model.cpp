#include "etm/firing_model.hpp"

#include <cmath>
#include <sstream>

#include "etm/errors.hpp"
#include "etm/quadrature.hpp"

namespace etm {

HazardCurve HazardCurve::sigmoid9(double b) {
  HazardCurve c;
  c.kind_ = Kind::Sigmoid9;
  c.param_ = b;
  // phi(r) = 1/(1+exp(-9br+3.5)); monotone in r, so the envelope over r >= 0
  // is attained at r = 0 or in the r -> infinity limit.
  const double at0 = 1.0 / (1.0 + std::exp(3.5));
  const double atinf = b > 0 ? 1.0 : (b < 0 ? 0.0 : at0);
  c.lo_ = std::max(1e-12, std::min(at0, atinf));
  c.hi_ = std::max(at0, atinf);
  return c;
}

HazardCurve HazardCurve::sat_quad(double b_bar) {
  if (b_bar < 0) throw ConfigError("sat_quad: b_bar must be >= 0");
  HazardCurve c;
  c.kind_ = Kind::SatQuad;
  c.param_ = b_bar;
  c.lo_ = 0.5;
  c.hi_ = 10.5;
  return c;
}

HazardCurve HazardCurve::constant(double s) {
  if (s <= 0) throw ConfigError("constant hazard must be positive");
  HazardCurve c;
  c.kind_ = Kind::Constant;
  c.param_ = s;
  c.lo_ = s;
  c.hi_ = s;
  return c;
}

HazardCurve HazardCurve::custom(std::function<double(double)> eval,
                                std::function<double(double)> d_eval,
                                double lower_bound, double upper_bound) {
  if (lower_bound <= 0) throw ConfigError("custom hazard needs a positive lower bound");
  HazardCurve c;
  c.kind_ = Kind::Custom;
  c.eval_ = std::move(eval);
  c.d_eval_ = std::move(d_eval);
  c.lo_ = lower_bound;
  c.hi_ = upper_bound;
  return c;
}

double HazardCurve::operator()(double r) const {
  switch (kind_) {
    case Kind::Sigmoid9:
      return 1.0 / (1.0 + std::exp(-9.0 * param_ * r + 3.5));
    case Kind::SatQuad: {
      const double q = param_ * r * r;
      return 10.0 * q / (q + 1.0) + 0.5;
    }
    case Kind::Constant:
      return param_;
    case Kind::Custom:
      return eval_(r);
  }
  return 0.0;
}

double HazardCurve::deriv(double r) const {
  switch (kind_) {
    case Kind::Sigmoid9: {
      const double p = (*this)(r);
      return 9.0 * param_ * p * (1.0 - p);
    }
    case Kind::SatQuad: {
      const double q = param_ * r * r + 1.0;
      return 20.0 * param_ * r / (q * q);
    }
    case Kind::Constant:
      return 0.0;
    case Kind::Custom:
      if (d_eval_) return d_eval_(r);
      const double h = 1e-6 * std::max(1.0, std::abs(r));
      return (eval_(r + h) - eval_(std::max(0.0, r - h))) /
             (h + std::min(r, h));
  }
  return 0.0;
}

FiringModel FiringModel::refractory(double sigma, HazardCurve phi) {
  if (sigma <= 0) throw ConfigError("refractory period sigma must be positive");
  FiringModel m;
  m.kind_ = Kind::Refractory;
  m.sigma_ = sigma;
  m.s0_ = phi.lower_bound();
  m.phi_ = std::move(phi);
  return m;
}

FiringModel FiringModel::custom(std::function<double(double, double)> eval,
                                std::function<double(double, double)> d_eval_dr,
                                double s0, double sigma, bool allow_fd) {
  if (s0 <= 0 || sigma <= 0)
    throw ConfigError("custom model must declare positive s0 and sigma");
  FiringModel m;
  m.kind_ = Kind::Custom;
  m.sigma_ = sigma;
  m.s0_ = s0;
  m.eval_ = std::move(eval);
  m.d_eval_ = std::move(d_eval_dr);
  m.allow_fd_ = allow_fd;
  return m;
}

const HazardCurve& FiringModel::phi() const {
  if (kind_ != Kind::Refractory)
    throw ConfigError("phi() is only defined for the Refractory kind");
  return phi_;
}

namespace {
void check_domain(double a, double r) {
  if (a < 0 || r < 0 || !std::isfinite(a) || !std::isfinite(r))
    throw DomainError("S(a,r) requires finite a >= 0 and r >= 0");
}
}  // namespace

double FiringModel::eval_S(double a, double r) const {
  check_domain(a, r);
  if (kind_ == Kind::Refractory) return a < sigma_ ? 0.0 : phi_(r);
  return eval_(a, r);
}

double FiringModel::eval_dSdr(double a, double r) const {
  check_domain(a, r);
  if (kind_ == Kind::Refractory) return a < sigma_ ? 0.0 : phi_.deriv(r);
  if (d_eval_) return d_eval_(a, r);
  if (!allow_fd_)
    throw ConfigError("custom model has no derivative and finite differences are disabled");
  const double h = 1e-6 * std::max(1.0, std::abs(r));
  const double rm = std::max(0.0, r - h);
  return (eval_(a, r + h) - eval_(a, rm)) / (r + h - rm);
}

double FiringModel::cumulative_S(double a, double r) const {
  check_domain(a, r);
  if (a == 0.0) return 0.0;
  if (kind_ == Kind::Refractory) return phi_(r) * std::max(a - sigma_, 0.0);
  if (a <= sigma_) {
    // The hazard may still be nonzero below sigma for Custom models.
    return gauss_adaptive([&](double s) { return eval_(s, r); }, 0.0, a);
  }
  return gauss_adaptive([&](double s) { return eval_(s, r); }, 0.0, sigma_) +
         gauss_adaptive([&](double s) { return eval_(s, r); }, sigma_, a);
}

double FiringModel::survival(double a, double r) const {
  return std::exp(-cumulative_S(a, r));
}

double FiringModel::hazard_upper_bound() const {
  if (kind_ == Kind::Refractory) {
    const double hi = phi_.upper_bound();
    return hi > 0 ? hi : 1.0;
  }
  // Custom models do not declare an upper bound; probe a coarse (a,r) grid.
  double hi = s0_;
  for (double a : {sigma_, 2 * sigma_, 5 * sigma_, 10 * sigma_})
    for (double r : {0.0, 0.5, 1.0, 2.0, 5.0}) hi = std::max(hi, eval_(a, r));
  return hi;
}

std::string FiringModel::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::Refractory) {
    os << "refractory(sigma=" << sigma_ << ",";
    switch (phi_.kind()) {
      case HazardCurve::Kind::Sigmoid9: os << "sigmoid9 b=" << phi_.param(); break;
      case HazardCurve::Kind::SatQuad: os << "satquad b_bar=" << phi_.param(); break;
      case HazardCurve::Kind::Constant: os << "constant s=" << phi_.param(); break;
      case HazardCurve::Kind::Custom: os << "custom phi"; break;
    }
    os << ")";
  } else {
    os << "custom(s0=" << s0_ << ",sigma=" << sigma_ << ")";
  }
  return os.str();
}

}  // namespace etm
