#pragma once

#include <span>

#include "lamplight/base_graph.hpp"
#include "lamplight/functionals.hpp"
#include "lamplight/lamp_system.hpp"
#include "lamplight/wreath.hpp"

namespace lamplight {

// Nonnegative operator -L, self-adjoint in L2(m) for the matching measure.
class SymmetricOperator {
 public:
  virtual ~SymmetricOperator() = default;
  virtual int dim() const = 0;
  // out = (-L) in
  virtual void apply(std::span<const double> in, std::span<double> out) const = 0;
};

// -L_base over the base graph, reversible for nu. No time rescaling: the
// spectral gap of this operator is gap(nu).
class BaseOperator final : public SymmetricOperator {
 public:
  explicit BaseOperator(const BaseGraph& g) : g_(&g) {}
  int dim() const override { return g_->size(); }
  void apply(std::span<const double> in, std::span<double> out) const override;

 private:
  const BaseGraph* g_;
};

// -L_lamps over the enumerated configuration space {0,1}^sites with
// single-site flips at rate c_x(sigma); reversible for mu.
class LampOperator final : public SymmetricOperator {
 public:
  explicit LampOperator(const LampSystem& sys);
  int dim() const override { return states_; }
  void apply(std::span<const double> in, std::span<double> out) const override;

 private:
  const LampSystem* sys_;
  int states_;
};

// -L of the wreath chain (the 1/2, 1/2 mixture); reversible for pi.
class WreathOperator final : public SymmetricOperator {
 public:
  explicit WreathOperator(const WreathChain& chain) : chain_(&chain) {}
  int dim() const override { return static_cast<int>(chain_->state_count()); }
  void apply(std::span<const double> in, std::span<double> out) const override;

 private:
  const WreathChain* chain_;
};

// <f, A f>_m; equals the corresponding Dirichlet form.
double quadratic_form(const SymmetricOperator& op, const WeightedSpace& m,
                      std::span<const double> f);

WeightedSpace nu_space(const BaseGraph& g);
WeightedSpace lamp_space(const LampSystem& sys);

}  // namespace lamplight
