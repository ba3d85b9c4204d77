#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lamplight/base_graph.hpp"
#include "lamplight/functionals.hpp"
#include "lamplight/lamp_system.hpp"

namespace lamplight {

struct ChainCaps {
  std::int64_t max_enumerable_states = std::int64_t{1} << 20;
  std::int64_t max_sparse_nonzeros = std::int64_t{1} << 24;
};

// Row-ordered compressed sparse matrix of the generator. Columns within a
// row are sorted ascending.
struct SparseGenerator {
  std::int64_t rows = 0;
  std::vector<std::int64_t> row_ptr;
  std::vector<std::int64_t> col;
  std::vector<double> val;

  void multiply(std::span<const double> in, std::span<double> out) const;
  double entry(std::int64_t r, std::int64_t c) const;
  double max_abs_row_sum() const;
};

// max over stored entries of |pi_r L(r,c) - pi_c L(c,r)|.
double max_pi_asymmetry(const SparseGenerator& gen,
                        std::span<const double> pi);

// Lamplighter chain over a base graph: states (sigma, x), stationary
// measure pi = mu x nu, generator L = 1/2 L_base + 1/2 L_lamps where the
// lamp at the walker's position flips at rate c_x(sigma).
//
// The chain is immutable after construction; pi enumeration and generator
// assembly happen once behind call_once and may be requested concurrently.
class WreathChain {
 public:
  WreathChain(BaseGraph base, LampSystem lamps, ChainCaps caps = {},
              std::string label = {});

  const BaseGraph& base() const { return base_; }
  const LampSystem& lamps() const { return lamps_; }
  const ChainCaps& caps() const { return caps_; }
  const std::string& label() const { return label_; }

  int sites() const { return base_.size(); }
  std::int64_t state_count() const { return states_; }

  std::int64_t index_of(LampConfig sigma, int x) const {
    return static_cast<std::int64_t>(sigma) * base_.size() + x;
  }
  std::pair<LampConfig, int> state_at(std::int64_t index) const {
    return {static_cast<LampConfig>(index / base_.size()),
            static_cast<int>(index % base_.size())};
  }

  double log_pi(LampConfig sigma, int x) const {
    return lamps_.measure.log_weight(sigma) + std::log(base_.nu(x));
  }
  double pi(LampConfig sigma, int x) const { return std::exp(log_pi(sigma, x)); }

  // Enumerated stationary measure; requires state_count() within the
  // enumeration cap. The raw weights must sum to 1 within 1e-10.
  const WeightedSpace& pi_space() const;

  // out = L f, matrix free.
  void apply_generator(std::span<const double> f, std::span<double> out) const;

  // E_pi(f, g) in the summed form
  //   1/4 [ sum pi p (D_base f)(D_base g) + sum pi c (D_lamp f)(D_lamp g) ];
  // equals -pi(f . L g) by detailed balance.
  double dirichlet_form(std::span<const double> f,
                        std::span<const double> g) const;
  double dirichlet_form(std::span<const double> f) const {
    return dirichlet_form(f, f);
  }

  const SparseGenerator& assemble_generator() const;

 private:
  BaseGraph base_;
  LampSystem lamps_;
  ChainCaps caps_;
  std::string label_;
  std::int64_t states_ = 0;

  mutable std::once_flag pi_once_;
  mutable std::optional<WeightedSpace> pi_;
  mutable std::once_flag gen_once_;
  mutable std::optional<SparseGenerator> generator_;
};

// State count after checking the enumeration cap.
std::int64_t enumerate_states(const WreathChain& chain);

}  // namespace lamplight
