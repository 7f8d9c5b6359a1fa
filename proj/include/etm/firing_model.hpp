#ifndef ETM_FIRING_MODEL_HPP
#define ETM_FIRING_MODEL_HPP

#include <functional>
#include <memory>
#include <string>

namespace etm {

/// Hazard curve phi(r): the post-refractory firing coefficient as a function
/// of the network activity r.
class HazardCurve {
 public:
  enum class Kind { Sigmoid9, SatQuad, Constant, Custom };

  static HazardCurve sigmoid9(double b);
  static HazardCurve sat_quad(double b_bar);
  static HazardCurve constant(double s);
  static HazardCurve custom(std::function<double(double)> eval,
                            std::function<double(double)> d_eval,
                            double lower_bound, double upper_bound);

  double operator()(double r) const;
  double deriv(double r) const;  // d phi / d r

  Kind kind() const { return kind_; }
  double lower_bound() const { return lo_; }  // inf of phi over r >= 0
  double upper_bound() const { return hi_; }
  double param() const { return param_; }  // b, b_bar or s

 private:
  friend class FiringModel;
  HazardCurve() = default;
  Kind kind_ = Kind::Constant;
  double param_ = 0.0;
  double lo_ = 0.0, hi_ = 0.0;
  std::function<double(double)> eval_, d_eval_;
};

/// Firing coefficient S(a,r). The refractory family phi(r)*1_{a>sigma} is the
/// distinguished closed-form subtype; arbitrary coefficients go through the
/// Custom kind, which must declare its envelope constants s0 and sigma.
class FiringModel {
 public:
  enum class Kind { Refractory, Custom };

  static FiringModel refractory(double sigma, HazardCurve phi);
  static FiringModel custom(std::function<double(double, double)> eval,
                            std::function<double(double, double)> d_eval_dr,
                            double s0, double sigma, bool allow_fd = true);

  Kind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  double s0() const { return s0_; }
  const HazardCurve& phi() const;  // Refractory only

  // S(a,r). Boundary convention: a = sigma counts as active.
  double eval_S(double a, double r) const;

  // dS/dr at (a,r): analytic when available, else central finite differences
  // with step 1e-6*max(1,|r|) when the model permits it.
  double eval_dSdr(double a, double r) const;

  // int_0^a S(s,r) ds. Closed form phi(r)*max(a-sigma,0) for Refractory.
  double cumulative_S(double a, double r) const;

  // exp(-cumulative_S), in (0,1].
  double survival(double a, double r) const;

  // Upper bound on the hazard at r-values of interest; used to size panels.
  double hazard_upper_bound() const;

  std::string describe() const;

 private:
  FiringModel() = default;
  Kind kind_ = Kind::Refractory;
  double sigma_ = 0.0, s0_ = 0.0;
  HazardCurve phi_;
  std::function<double(double, double)> eval_, d_eval_;
  bool allow_fd_ = true;
};

}  // namespace etm

#endif
