#include "lamplight/operators.hpp"

#include <cmath>
#include <vector>

namespace lamplight {

void BaseOperator::apply(std::span<const double> in,
                         std::span<double> out) const {
  const int n = g_->size();
  for (int x = 0; x < n; ++x) {
    double acc = 0.0;
    for (const Edge& e : g_->neighbors(x)) {
      if (e.to == x) continue;
      acc += e.p * (in[x] - in[e.to]);
    }
    out[x] = acc;
  }
}

LampOperator::LampOperator(const LampSystem& sys) : sys_(&sys) {
  if (sys.sites() > kMaxEnumeratedSites)
    throw CapExceeded("lamp operator needs 2^" + std::to_string(sys.sites()) +
                      " states");
  states_ = 1 << sys.sites();
}

void LampOperator::apply(std::span<const double> in,
                         std::span<double> out) const {
  const int sites = sys_->sites();
  for (std::uint64_t sigma = 0; sigma < static_cast<std::uint64_t>(states_);
       ++sigma) {
    double acc = 0.0;
    for (int x = 0; x < sites; ++x)
      acc += sys_->rates.rate(sys_->measure, sigma, x) *
             (in[sigma] - in[flip_lamp(sigma, x)]);
    out[sigma] = acc;
  }
}

void WreathOperator::apply(std::span<const double> in,
                           std::span<double> out) const {
  chain_->apply_generator(in, out);
  for (double& v : out) v = -v;
}

double quadratic_form(const SymmetricOperator& op, const WeightedSpace& m,
                      std::span<const double> f) {
  std::vector<double> af(op.dim());
  op.apply(f, af);
  double acc = 0.0;
  for (int i = 0; i < op.dim(); ++i) acc += m.weight(i) * f[i] * af[i];
  return acc;
}

WeightedSpace nu_space(const BaseGraph& g) {
  return WeightedSpace(g.nu());
}

WeightedSpace lamp_space(const LampSystem& sys) {
  if (sys.sites() > kMaxEnumeratedSites)
    throw CapExceeded("lamp space needs 2^" + std::to_string(sys.sites()) +
                      " states");
  const std::uint64_t configs = std::uint64_t{1} << sys.sites();
  std::vector<double> logw(configs);
  for (std::uint64_t sigma = 0; sigma < configs; ++sigma)
    logw[sigma] = sys.measure.log_weight(sigma);
  return WeightedSpace::from_log_weights(std::move(logw));
}

}  // namespace lamplight
