// SPDX-License-Identifier: Apache-2.0
#include "boltz/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include <nlohmann/json.hpp>

#include "boltz/error.hpp"
#include "boltz/quadrature.hpp"
#include "boltz/special_functions.hpp"

namespace boltz {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

AngularProfile AngularProfile::constant(double value) {
  if (value < 0.0) throw Error("AngularProfile: b must be nonnegative");
  AngularProfile p;
  p.kind_ = Kind::Constant;
  p.constant_value_ = value;
  p.singularity_exponent_ = 0.0;
  return p;
}

AngularProfile AngularProfile::inverse_power(double s, double cprime) {
  if (!(s > 5.0)) throw Error("AngularProfile: inverse power law needs s > 5");
  if (!(cprime > 0.0)) throw Error("AngularProfile: cprime must be positive");
  AngularProfile p;
  p.kind_ = Kind::InversePower;
  p.ipl_s_ = s;
  p.ipl_cprime_ = cprime;
  // b ~ cprime theta^{-2-2/(s-1)} near the endpoints.
  p.singularity_exponent_ = 2.0 + 2.0 / (s - 1.0);
  return p;
}

AngularProfile AngularProfile::table(std::vector<double> theta, std::vector<double> value,
                                     std::optional<double> singularity_exponent) {
  if (theta.size() != value.size() || theta.size() < 2)
    throw Error("AngularProfile: table needs matching theta/value arrays, size >= 2");
  for (std::size_t i = 1; i < theta.size(); ++i)
    if (!(theta[i] > theta[i - 1])) throw Error("AngularProfile: table theta not increasing");
  for (double v : value)
    if (v < 0.0) throw Error("AngularProfile: b must be nonnegative");
  AngularProfile p;
  p.kind_ = Kind::Table;
  p.table_theta_ = std::move(theta);
  p.table_value_ = std::move(value);
  p.singularity_exponent_ = singularity_exponent ? singularity_exponent
                                                 : std::optional<double>(0.0);
  return p;
}

AngularProfile AngularProfile::custom(std::function<double(double)> fn,
                                      std::optional<double> singularity_exponent) {
  AngularProfile p;
  p.kind_ = Kind::Custom;
  p.custom_ = std::move(fn);
  p.singularity_exponent_ = singularity_exponent;
  return p;
}

double AngularProfile::operator()(double theta) const {
  switch (kind_) {
    case Kind::Constant:
      return constant_value_;
    case Kind::InversePower: {
      const double x = std::min(theta, kPi - theta);
      if (!(x > 0.0)) return kInf;
      return ipl_cprime_ * std::pow(x, -1.0 - 2.0 / (ipl_s_ - 1.0)) / std::sin(x);
    }
    case Kind::Table: {
      if (theta <= table_theta_.front()) return table_value_.front();
      if (theta >= table_theta_.back()) return table_value_.back();
      const auto it =
          std::upper_bound(table_theta_.begin(), table_theta_.end(), theta);
      const std::size_t j = static_cast<std::size_t>(it - table_theta_.begin());
      const double t0 = table_theta_[j - 1], t1 = table_theta_[j];
      const double f = (theta - t0) / (t1 - t0);
      return (1.0 - f) * table_value_[j - 1] + f * table_value_[j];
    }
    case Kind::Custom:
      return custom_(theta);
  }
  return 0.0;
}

struct KernelSpec::Cache {
  std::mutex mu;
  std::optional<KernelConstants> base;  // constants without ap_star
};

KernelSpec::KernelSpec(int dimension, double gamma, AngularProfile angular,
                       std::optional<double> truncation_level)
    : dim_(dimension),
      gamma_(gamma),
      angular_(std::move(angular)),
      truncation_(truncation_level),
      cache_(std::make_shared<Cache>()) {
  if (dimension < 2) throw Error("KernelSpec: dimension must be >= 2");
  if (!(gamma > 0.0) || gamma > 2.0) throw Error("KernelSpec: gamma must be in (0, 2]");
  if (truncation_ && !(*truncation_ > 0.0))
    throw Error("KernelSpec: truncation level must be positive");
}

double KernelSpec::b(double theta) const {
  const double raw = angular_(theta);
  return truncation_ ? std::min(raw, *truncation_) : raw;
}

double KernelSpec::kinetic(double r) const {
  const double raw = std::pow(r, gamma_);
  return truncation_ ? std::min(raw, *truncation_) : raw;
}

namespace {

// Endpoint behavior of the *effective* b: truncated kernels are bounded.
std::optional<double> effective_exponent(const KernelSpec& spec) {
  if (spec.truncation_level()) return 0.0;
  return spec.angular().singularity_exponent();
}

struct AngularIntegral {
  double value = 0.0;
  bool finite = false;
  double error = 0.0;
};

// ∫_0^pi b_eff(theta) w(theta) dtheta where w vanishes like theta^{m} at both
// endpoints. With a declared endpoint exponent nu the finiteness is decided
// analytically (power-type singularities: converges iff m - nu > -1);
// otherwise the endpoint scan decides numerically.
AngularIntegral angular_integral(const KernelSpec& spec, const Integrand& weight,
                                 double weight_order_at_endpoints, double tol) {
  AngularIntegral out;
  const std::optional<double> nu = effective_exponent(spec);
  auto f = [&](double theta) { return spec.b(theta) * weight(theta); };
  if (nu) {
    if (weight_order_at_endpoints - *nu <= -1.0) {
      out.finite = false;
      out.value = kInf;
      return out;
    }
    const bool singular = *nu > 0.0;
    QuadratureResult q = integrate_endpoint_singular(f, 0.0, kPi, singular, singular, tol);
    out.value = q.value;
    out.error = q.error_estimate;
    out.finite = !q.diverged;
    return out;
  }
  QuadratureResult q = integrate_endpoint_singular(f, 0.0, kPi, true, true, tol);
  out.value = q.value;
  out.error = q.error_estimate;
  out.finite = !q.diverged;
  if (!out.finite) out.value = kInf;
  return out;
}

double sin_pow(double theta, double p) { return std::pow(std::sin(theta), p); }

}  // namespace

KernelConstants constants(const KernelSpec& spec, std::optional<double> p1) {
  const int n = spec.dimension();
  const double surf = sphere_area(n - 2);
  KernelConstants out;
  bool have_base = false;
  {
    std::lock_guard<std::mutex> lock(spec.cache_->mu);
    if (spec.cache_->base) {
      out = *spec.cache_->base;
      have_base = true;
    }
  }
  if (!have_base) {
    AngularIntegral a0 = angular_integral(
        spec, [n](double t) { return sin_pow(t, n - 2.0); }, n - 2.0, 1e-12);
    AngularIntegral a2 = angular_integral(
        spec, [n](double t) { return sin_pow(t, static_cast<double>(n)); },
        static_cast<double>(n), 1e-12);
    out.A0 = a0.finite ? surf * a0.value : kInf;
    out.A2 = a2.finite ? surf * a2.value : kInf;
    out.quadrature_error_estimate =
        surf * ((a0.finite ? a0.error : 0.0) + a2.error);
    std::lock_guard<std::mutex> lock(spec.cache_->mu);
    spec.cache_->base = out;
  }
  if (p1) {
    if (!(*p1 > 1.0)) throw Error("constants: p1 must be > 1");
    if (spec.gamma() != 2.0)
      throw Error("constants: A*_{p1} is defined for gamma = 2 only");
    const double p = *p1;
    // ∫ b^{p1} sin^{N-2}: fold the power into the integrand directly.
    auto f = [&](double theta) {
      return std::pow(spec.b(theta), p) * sin_pow(theta, n - 2.0);
    };
    const std::optional<double> nu = effective_exponent(spec);
    const bool singular = !nu || *nu > 0.0;
    bool finite = !(nu && (n - 2.0) - p * (*nu) <= -1.0);
    if (finite) {
      QuadratureResult q =
          integrate_endpoint_singular(f, 0.0, kPi, singular, singular, 1e-12);
      finite = !q.diverged;
      if (finite)
        out.ap_star = KernelConstants::ApStar{p, surf * std::pow(q.value, 1.0 / p)};
    }
    if (!finite) out.ap_star = KernelConstants::ApStar{p, kInf};
  }
  return out;
}

const KernelConstants& KernelSpec::constants_cached() const {
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    if (cache_->base) return *cache_->base;
  }
  (void)boltz::constants(*this);
  std::lock_guard<std::mutex> lock(cache_->mu);
  return *cache_->base;
}

std::string to_string(Assumption a) {
  switch (a) {
    case Assumption::H0: return "H0";
    case Assumption::H1: return "H1";
    case Assumption::H2: return "H2";
    case Assumption::H3: return "H3";
    case Assumption::H4: return "H4";
  }
  return "?";
}

AssumptionReport classify_report(const KernelSpec& spec, double tol) {
  const int n = spec.dimension();
  AssumptionReport rep;
  const double nd = static_cast<double>(n);

  AngularIntegral h0 =
      angular_integral(spec, [nd](double t) { return sin_pow(t, nd); }, nd, tol);
  rep.h0_b = h0.finite;

  AngularIntegral h1 = angular_integral(
      spec,
      [nd](double t) {
        return sin_pow(t, nd) * (1.0 + std::abs(std::log(std::sin(t))));
      },
      nd, tol);
  rep.h1_b = h1.finite;

  AngularIntegral h4 =
      angular_integral(spec, [nd](double t) { return sin_pow(t, nd - 2.0); }, nd - 2.0, tol);
  rep.h4_b = h4.finite;

  // H2 b-component at the gamma of this spec; only meaningful for
  // 1 < gamma < 2 where nu_h2 = 2 - 2/gamma in (0,1).
  const double g = spec.gamma();
  if (g > 1.0 && g < 2.0) {
    const double nu2 = 2.0 - 2.0 / g;
    AngularIntegral h2 = angular_integral(
        spec, [nd, nu2](double t) { return sin_pow(t, nd - 2.0 * nu2); }, nd - 2.0 * nu2,
        tol);
    rep.h2_b = h2.finite;
  } else {
    // Convention: report the weakest in-family b-integrability (sin^{N-2nu}
    // with nu -> 1^-), which coincides with H4|_b.
    rep.h2_b = rep.h4_b;
  }

  // H3 b-component: exists p in (1, inf) with ∫ b^p sin^{N-2} < inf. With a
  // declared endpoint exponent this holds iff nu < N-1; otherwise probe a
  // small p.
  const std::optional<double> nu = effective_exponent(spec);
  if (nu) {
    rep.h3_b = *nu < nd - 1.0;
  } else {
    const double p_probe = 1.125;
    auto f = [&](double theta) {
      return std::pow(spec.b(theta), p_probe) * sin_pow(theta, nd - 2.0);
    };
    QuadratureResult q = integrate_endpoint_singular(f, 0.0, kPi, true, true, tol);
    rep.h3_b = !q.diverged;
  }

  if (rep.h0_b) rep.labels.insert(Assumption::H0);
  if (rep.h1_b) rep.labels.insert(Assumption::H1);
  if (rep.h2_b && g > 1.0 && g < 2.0) rep.labels.insert(Assumption::H2);
  if (rep.h3_b && g == 2.0) rep.labels.insert(Assumption::H3);
  if (rep.h4_b) rep.labels.insert(Assumption::H4);
  return rep;
}

std::set<Assumption> classify_assumptions(const KernelSpec& spec, double tol) {
  return classify_report(spec, tol).labels;
}

namespace {

// ∫_0^1 t (1 - c t)^{p-2} dt in closed form, c in [0, 1/2]; series branch
// protects against cancellation when c (p-2) is small.
double inner_t_integral(double c, double p) {
  if (c * (p - 2.0) < 0.125) {
    double sum = 0.0;
    double term;
    for (int j = 0; j < 24; ++j) {
      term = binomial(p - 2.0, j) * std::pow(-c, j) / (j + 2.0);
      sum += term;
      if (std::abs(term) < 1e-18) break;
    }
    return sum;
  }
  const double l = std::log1p(-c);
  const double u1 = -std::expm1((p - 1.0) * l);  // 1-(1-c)^{p-1}
  const double u2 = -std::expm1(p * l);          // 1-(1-c)^{p}
  return (p * u1 - (p - 1.0) * u2) / (p * (p - 1.0) * c * c);
}

}  // namespace

double epsilon_p(const KernelSpec& spec, double p) {
  if (!(p >= 3.0)) throw Error("epsilon_p: p must be >= 3");
  const KernelConstants c = spec.constants_cached();
  if (!std::isfinite(c.A2)) throw Error("epsilon_p: spec does not satisfy H0");
  if (c.A2 == 0.0) throw Error("epsilon_p: A2 = 0, remainder undefined");
  const int n = spec.dimension();
  const double surf = sphere_area(n - 2);
  auto f = [&](double theta) {
    const double st = std::sin(theta);
    const double inner = inner_t_integral(0.5 * st * st, p);
    return inner * spec.b(theta) * std::pow(st, static_cast<double>(n));
  };
  const std::optional<double> nu = effective_exponent(spec);
  const bool singular = !nu || *nu > 0.0;
  QuadratureResult q = integrate_endpoint_singular(f, 0.0, kPi, singular, singular, 1e-13);
  if (q.diverged) throw Error("epsilon_p: angular integral diverged");
  return 2.0 / c.A2 * surf * q.value;
}

KernelSpec truncate(const KernelSpec& spec, double n) {
  if (!(n > 0.0)) throw Error("truncate: level must be positive");
  return KernelSpec(spec.dimension(), spec.gamma(), spec.angular(), n);
}

KernelSpec inverse_power_law(double s, int dimension, double cprime) {
  if (!(s > 5.0)) throw Error("inverse_power_law: hard potentials require s > 5");
  const double gamma = (s - 5.0) / (s - 1.0);
  return KernelSpec(dimension, gamma, AngularProfile::inverse_power(s, cprime));
}

KernelSpec hard_sphere() {
  return KernelSpec(3, 1.0, AngularProfile::constant(1.0 / (4.0 * kPi)));
}

std::string to_json(const KernelSpec& spec) {
  nlohmann::json angular;
  const AngularProfile& a = spec.angular();
  switch (a.kind()) {
    case AngularProfile::Kind::Constant:
      angular = {{"kind", "constant"}, {"value", a.constant_value()}};
      break;
    case AngularProfile::Kind::InversePower:
      angular = {{"kind", "inverse_power"}, {"s", a.ipl_s()}, {"cprime", a.ipl_cprime()}};
      break;
    case AngularProfile::Kind::Table: {
      angular = {{"kind", "table"},
                 {"theta", a.table_theta()},
                 {"values", a.table_value()}};
      if (a.singularity_exponent())
        angular["singularity_exponent"] = *a.singularity_exponent();
      break;
    }
    case AngularProfile::Kind::Custom:
      throw Error("to_json: custom angular profiles are not serializable");
  }
  nlohmann::json j{{"N", spec.dimension()}, {"gamma", spec.gamma()}, {"angular", angular}};
  if (spec.truncation_level())
    j["truncation"] = *spec.truncation_level();
  else
    j["truncation"] = nullptr;
  return j.dump();
}

KernelSpec kernel_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const int n = j.at("N").get<int>();
  const double gamma = j.at("gamma").get<double>();
  const nlohmann::json& a = j.at("angular");
  const std::string kind = a.at("kind").get<std::string>();
  AngularProfile profile = AngularProfile::constant(0.0);
  if (kind == "constant") {
    profile = AngularProfile::constant(a.at("value").get<double>());
  } else if (kind == "inverse_power") {
    profile = AngularProfile::inverse_power(a.at("s").get<double>(),
                                            a.value("cprime", 1.0));
  } else if (kind == "table") {
    std::optional<double> nu;
    if (a.contains("singularity_exponent") && !a.at("singularity_exponent").is_null())
      nu = a.at("singularity_exponent").get<double>();
    profile = AngularProfile::table(a.at("theta").get<std::vector<double>>(),
                                    a.at("values").get<std::vector<double>>(), nu);
  } else {
    throw Error("kernel JSON: unknown angular kind '" + kind + "'");
  }
  std::optional<double> trunc;
  if (j.contains("truncation") && !j.at("truncation").is_null())
    trunc = j.at("truncation").get<double>();
  return KernelSpec(n, gamma, profile, trunc);
}

}  // namespace boltz
