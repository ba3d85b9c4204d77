#pragma once

#include <functional>
#include <span>
#include <vector>

#include "lamplight/errors.hpp"

namespace lamplight {

// A Dirichlet-form evaluator over function tables.
using FormFn = std::function<double(std::span<const double>)>;

// Finite probability space. Weights are kept both linearly and in the log
// domain; construction from log weights normalizes exactly via log-sum-exp.
class WeightedSpace {
 public:
  explicit WeightedSpace(std::vector<double> weights);
  static WeightedSpace from_log_weights(std::vector<double> log_weights);

  int size() const { return static_cast<int>(weights_.size()); }
  double weight(int i) const { return weights_[i]; }
  double log_weight(int i) const { return log_weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  double min_weight() const;

 private:
  WeightedSpace() = default;
  std::vector<double> weights_;
  std::vector<double> log_weights_;
};

// Mean of f under m.
double mean(const WeightedSpace& m, std::span<const double> f);

// Var_m(f) = m(f^2) - m(f)^2, computed in a centered two-pass form.
double variance(const WeightedSpace& m, std::span<const double> f);

// Ent_m(f^2) = m(f^2 log(f^2 / m(f^2))) with 0 log 0 := 0. Nonnegative;
// throws ZeroFunction when f vanishes identically.
double entropy_of_square(const WeightedSpace& m, std::span<const double> f);

// Ent_m(f^2) / E(f). Throws DegenerateDirichlet when E(f) is numerically
// zero relative to m(f^2), i.e. f is almost-surely constant.
double logsob_quotient(const WeightedSpace& m, const FormFn& energy,
                       std::span<const double> f);

class BaseGraph;
struct LampSystem;

// E_nu(g) = 1/2 sum_x sum_{y~x} nu(x) p(x,y) (g(y)-g(x))^2.
double base_dirichlet(const BaseGraph& g, std::span<const double> f);

// E_mu(h) = 1/2 sum_sigma sum_x mu(sigma) c_x(sigma) (h(sigma^x)-h(sigma))^2,
// enumerated over all 2^sites configurations.
double lamp_dirichlet(const LampSystem& sys, std::span<const double> h);

}  // namespace lamplight
