#include "lamplight/lamp_system.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "lamplight/base_graph.hpp"

namespace lamplight {

namespace {

void require_enumerable(int sites, const char* what) {
  if (sites > kMaxEnumeratedSites)
    throw CapExceeded(std::string(what) + " needs 2^" + std::to_string(sites) +
                      " configurations, cap is 2^" +
                      std::to_string(kMaxEnumeratedSites));
}

double log_sigmoid_arg(double delta) {
  // 1 / (1 + exp(-delta)) evaluated stably.
  if (delta >= 0.0) return 1.0 / (1.0 + std::exp(-delta));
  const double e = std::exp(delta);
  return e / (1.0 + e);
}

}  // namespace

LampMeasure LampMeasure::uniform(int sites) {
  if (sites < 1 || sites > 62) throw DomainError("site count out of range");
  return LampMeasure(MeasureKind::Uniform, sites);
}

LampMeasure LampMeasure::bernoulli(int sites, double p) {
  if (sites < 1 || sites > 62) throw DomainError("site count out of range");
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("Bernoulli parameter must lie in (0, 1)");
  LampMeasure m(MeasureKind::BernoulliProduct, sites);
  m.p_ = p;
  return m;
}

LampMeasure LampMeasure::gibbs(const BaseGraph& base, double beta) {
  const int sites = base.size();
  require_enumerable(sites, "Gibbs partition sum");
  LampMeasure m(MeasureKind::Gibbs, sites);
  m.beta_ = beta;
  for (int x = 0; x < sites; ++x)
    for (const Edge& e : base.neighbors(x))
      if (e.to > x) m.edges_.push_back({x, e.to});
  // log Z by exhaustive log-sum-exp.
  const std::uint64_t configs = std::uint64_t{1} << sites;
  std::vector<double> raw(configs);
  double top = -1e300;
  for (std::uint64_t sigma = 0; sigma < configs; ++sigma) {
    raw[sigma] = m.interaction(sigma);
    top = std::max(top, raw[sigma]);
  }
  double total = 0.0;
  for (double r : raw) total += std::exp(r - top);
  m.log_partition_ = top + std::log(total);
  return m;
}

double LampMeasure::interaction(LampConfig sigma) const {
  double energy = 0.0;
  for (const auto& [x, y] : edges_) {
    const double sx = lamp_on(sigma, x) ? 1.0 : -1.0;
    const double sy = lamp_on(sigma, y) ? 1.0 : -1.0;
    energy += sx * sy;
  }
  return beta_ * energy;
}

double LampMeasure::log_weight(LampConfig sigma) const {
  switch (kind_) {
    case MeasureKind::Uniform:
      return -sites_ * std::log(2.0);
    case MeasureKind::BernoulliProduct: {
      const int on = std::popcount(sigma & ((sites_ == 64)
                                                ? ~LampConfig{0}
                                                : ((LampConfig{1} << sites_) - 1)));
      return on * std::log(p_) + (sites_ - on) * std::log(1.0 - p_);
    }
    case MeasureKind::Gibbs:
      return interaction(sigma) - log_partition_;
  }
  return 0.0;
}

bool LampMeasure::is_uniform() const {
  if (kind_ == MeasureKind::Uniform) return true;
  if (kind_ == MeasureKind::BernoulliProduct)
    return std::abs(p_ - 0.5) <= kProbTol;
  if (kind_ == MeasureKind::Gibbs) return beta_ == 0.0;
  return false;
}

std::string LampMeasure::describe() const {
  switch (kind_) {
    case MeasureKind::Uniform:
      return "uniform";
    case MeasureKind::BernoulliProduct:
      return "bernoulli(" + std::to_string(p_) + ")";
    case MeasureKind::Gibbs:
      return "gibbs(beta=" + std::to_string(beta_) + ")";
  }
  return "?";
}

FlipRateModel FlipRateModel::constant(double c) {
  if (!(c > 0.0)) throw DomainError("constant rate must be positive");
  FlipRateModel m(RateKind::Constant);
  m.c_ = c;
  return m;
}

FlipRateModel FlipRateModel::bernoulli(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("Bernoulli rate parameter must lie in (0, 1)");
  FlipRateModel m(RateKind::Bernoulli);
  m.p_ = p;
  return m;
}

FlipRateModel FlipRateModel::heat_bath() {
  return FlipRateModel(RateKind::HeatBath);
}

double FlipRateModel::rate(const LampMeasure& mu, LampConfig sigma,
                           int x) const {
  switch (kind_) {
    case RateKind::Constant:
      return c_;
    case RateKind::Bernoulli:
      return lamp_on(sigma, x) ? 1.0 - p_ : p_;
    case RateKind::HeatBath: {
      const double delta =
          mu.log_weight(flip_lamp(sigma, x)) - mu.log_weight(sigma);
      return log_sigmoid_arg(delta);
    }
  }
  return 0.0;
}

std::string FlipRateModel::describe() const {
  switch (kind_) {
    case RateKind::Constant:
      return "constant(" + std::to_string(c_) + ")";
    case RateKind::Bernoulli:
      return "bernoulli(" + std::to_string(p_) + ")";
    case RateKind::HeatBath:
      return "heatbath";
  }
  return "?";
}

void check_compatible(const LampMeasure& mu, const FlipRateModel& rates) {
  switch (rates.kind()) {
    case RateKind::Constant:
      if (!mu.is_uniform())
        throw IncompatibleModel(
            "constant rates satisfy detailed balance only against the "
            "uniform measure");
      return;
    case RateKind::Bernoulli: {
      const double p = rates.p();
      if (mu.kind() == MeasureKind::BernoulliProduct &&
          std::abs(mu.p() - p) <= kProbTol)
        return;
      if (mu.is_uniform() && std::abs(p - 0.5) <= kProbTol) return;
      throw IncompatibleModel(
          "Bernoulli rates require the matching Bernoulli product measure");
    }
    case RateKind::HeatBath:
      return;
  }
}

double flip_rate(const FlipRateModel& rates, const LampMeasure& mu,
                 LampConfig sigma, int x) {
  check_compatible(mu, rates);
  if (x < 0 || x >= mu.sites()) throw DomainError("site index out of range");
  return rates.rate(mu, sigma, x);
}

double max_rate(const FlipRateModel& rates, const LampMeasure& mu) {
  switch (rates.kind()) {
    case RateKind::Constant:
      return rates.c();
    case RateKind::Bernoulli:
      return std::max(rates.p(), 1.0 - rates.p());
    case RateKind::HeatBath: {
      if (mu.kind() == MeasureKind::Uniform) return 0.5;
      if (mu.kind() == MeasureKind::BernoulliProduct)
        return std::max(mu.p(), 1.0 - mu.p());
      // Gibbs: exhaustive scan over (sigma, x).
      require_enumerable(mu.sites(), "heat-bath rate scan");
      const std::uint64_t configs = std::uint64_t{1} << mu.sites();
      double best = 0.0;
      for (std::uint64_t sigma = 0; sigma < configs; ++sigma)
        for (int x = 0; x < mu.sites(); ++x)
          best = std::max(best, rates.rate(mu, sigma, x));
      return best;
    }
  }
  return 0.0;
}

LampBalanceReport validate_lamp_detailed_balance(const LampMeasure& mu,
                                                 const FlipRateModel& rates) {
  require_enumerable(mu.sites(), "detailed balance scan");
  const std::uint64_t configs = std::uint64_t{1} << mu.sites();
  LampBalanceReport rep;
  for (std::uint64_t sigma = 0; sigma < configs; ++sigma) {
    const double w = std::exp(mu.log_weight(sigma));
    for (int x = 0; x < mu.sites(); ++x) {
      const LampConfig flipped = flip_lamp(sigma, x);
      const double w_flipped = std::exp(mu.log_weight(flipped));
      const double violation = std::abs(w * rates.rate(mu, sigma, x) -
                                        w_flipped * rates.rate(mu, flipped, x));
      if (violation > rep.max_violation) {
        rep.max_violation = violation;
        rep.worst_config = sigma;
        rep.worst_site = x;
      }
    }
  }
  return rep;
}

LampSystem::LampSystem(LampMeasure measure_in, FlipRateModel rates_in)
    : measure(std::move(measure_in)), rates(rates_in) {
  check_compatible(measure, rates);
}

double LampSystem::max_rate() const { return lamplight::max_rate(rates, measure); }

LampSystem load_lamp_system(const std::string& json_text,
                            const BaseGraph& base) {
  nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded())
    throw SchemaError("lamp-system document is not valid JSON");
  if (!doc.is_object() || !doc.contains("measure") || !doc.contains("rates"))
    throw SchemaError("lamp-system document needs \"measure\" and \"rates\"");

  const auto& md = doc["measure"];
  if (!md.is_object() || !md.contains("kind") || !md["kind"].is_string())
    throw SchemaError("measure needs a string field \"kind\"");
  const std::string mk = md["kind"].get<std::string>();
  auto number_field = [](const nlohmann::json& obj, const char* name) {
    if (!obj.contains(name) || !obj[name].is_number())
      throw SchemaError(std::string("missing numeric field \"") + name + "\"");
    return obj[name].get<double>();
  };

  LampMeasure measure = [&] {
    if (mk == "uniform") return LampMeasure::uniform(base.size());
    if (mk == "bernoulli")
      return LampMeasure::bernoulli(base.size(), number_field(md, "p"));
    if (mk == "gibbs") return LampMeasure::gibbs(base, number_field(md, "beta"));
    throw SchemaError("unknown measure kind \"" + mk + "\"");
  }();

  const auto& rd = doc["rates"];
  if (!rd.is_object() || !rd.contains("kind") || !rd["kind"].is_string())
    throw SchemaError("rates need a string field \"kind\"");
  const std::string rk = rd["kind"].get<std::string>();
  FlipRateModel rates = [&] {
    if (rk == "constant") return FlipRateModel::constant(number_field(rd, "c"));
    if (rk == "bernoulli")
      return FlipRateModel::bernoulli(number_field(rd, "p"));
    if (rk == "heatbath") return FlipRateModel::heat_bath();
    throw SchemaError("unknown rate kind \"" + rk + "\"");
  }();

  return LampSystem(std::move(measure), rates);
}

}  // namespace lamplight
