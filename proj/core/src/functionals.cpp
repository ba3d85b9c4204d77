#include "lamplight/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "lamplight/base_graph.hpp"
#include "lamplight/lamp_system.hpp"

namespace lamplight {

namespace {

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// Squares below this are treated as exact zeros inside logs.
constexpr double kLogFloor = 1e-300;

}  // namespace

WeightedSpace::WeightedSpace(std::vector<double> weights) {
  if (weights.empty()) throw DomainError("weighted space needs points");
  KahanSum total;
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("weights must be positive");
    total.add(w);
  }
  if (std::abs(total.sum - 1.0) > 1e-10)
    throw DomainError("weights sum to " + std::to_string(total.sum) +
                      ", expected 1");
  weights_ = std::move(weights);
  log_weights_.resize(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i)
    log_weights_[i] = std::log(weights_[i]);
}

WeightedSpace WeightedSpace::from_log_weights(std::vector<double> log_weights) {
  if (log_weights.empty()) throw DomainError("weighted space needs points");
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  KahanSum total;
  for (double lw : log_weights) total.add(std::exp(lw - top));
  const double log_norm = top + std::log(total.sum);
  WeightedSpace m;
  m.log_weights_.resize(log_weights.size());
  m.weights_.resize(log_weights.size());
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    m.log_weights_[i] = log_weights[i] - log_norm;
    m.weights_[i] = std::exp(m.log_weights_[i]);
    if (!(m.weights_[i] > 0.0))
      throw DomainError("log weight underflowed to zero");
  }
  return m;
}

double WeightedSpace::min_weight() const {
  return *std::min_element(weights_.begin(), weights_.end());
}

double mean(const WeightedSpace& m, std::span<const double> f) {
  KahanSum s;
  for (int i = 0; i < m.size(); ++i) s.add(m.weight(i) * f[i]);
  return s.sum;
}

double variance(const WeightedSpace& m, std::span<const double> f) {
  const double mu = mean(m, f);
  KahanSum s;
  for (int i = 0; i < m.size(); ++i) {
    const double d = f[i] - mu;
    s.add(m.weight(i) * d * d);
  }
  return s.sum;
}

double entropy_of_square(const WeightedSpace& m, std::span<const double> f) {
  KahanSum second_moment;
  for (int i = 0; i < m.size(); ++i)
    second_moment.add(m.weight(i) * f[i] * f[i]);
  const double s = second_moment.sum;
  if (!(s > 0.0)) throw ZeroFunction("entropy of the zero function");
  const double log_s = std::log(s);
  KahanSum ent;
  for (int i = 0; i < m.size(); ++i) {
    const double sq = f[i] * f[i];
    if (sq < kLogFloor) continue;  // 0 log 0 := 0
    ent.add(m.weight(i) * sq * (std::log(sq) - log_s));
  }
  // Jensen guarantees nonnegativity; clip the rounding residue.
  return std::max(ent.sum, 0.0);
}

double logsob_quotient(const WeightedSpace& m, const FormFn& energy,
                       std::span<const double> f) {
  KahanSum second_moment;
  for (int i = 0; i < m.size(); ++i)
    second_moment.add(m.weight(i) * f[i] * f[i]);
  if (!(second_moment.sum > 0.0))
    throw ZeroFunction("quotient of the zero function");
  const double e = energy(f);
  if (e <= 1e-13 * second_moment.sum)
    throw DegenerateDirichlet(
        "Dirichlet form vanishes: function is almost-surely constant");
  return entropy_of_square(m, f) / e;
}

double base_dirichlet(const BaseGraph& g, std::span<const double> f) {
  KahanSum s;
  for (int x = 0; x < g.size(); ++x) {
    for (const Edge& e : g.neighbors(x)) {
      const double d = f[e.to] - f[x];
      s.add(g.nu(x) * e.p * d * d);
    }
  }
  return 0.5 * s.sum;
}

double lamp_dirichlet(const LampSystem& sys, std::span<const double> h) {
  const int sites = sys.sites();
  const std::uint64_t configs = std::uint64_t{1} << sites;
  if (static_cast<std::uint64_t>(h.size()) != configs)
    throw DomainError("function table size does not match configuration count");
  KahanSum s;
  for (std::uint64_t sigma = 0; sigma < configs; ++sigma) {
    const double mu = std::exp(sys.measure.log_weight(sigma));
    for (int x = 0; x < sites; ++x) {
      const double d = h[sigma ^ (std::uint64_t{1} << x)] - h[sigma];
      s.add(mu * sys.rates.rate(sys.measure, sigma, x) * d * d);
    }
  }
  return 0.5 * s.sum;
}

}  // namespace lamplight
