// SPDX-License-Identifier: Apache-2.0
#include "boltz/measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "boltz/error.hpp"
#include "boltz/rng.hpp"

namespace boltz {

namespace {

using Key = std::vector<std::uint64_t>;

Key bit_key(VecView v) {
  Key k(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) k[i] = std::bit_cast<std::uint64_t>(v[i]);
  return k;
}

}  // namespace

SignedMeasure::SignedMeasure(int dimension) : dim_(dimension) {
  if (dimension < 2) throw Error("SignedMeasure: dimension must be >= 2");
}

void SignedMeasure::add_atom(VecView v, double w) {
  if (static_cast<int>(v.size()) != dim_)
    throw Error("SignedMeasure: velocity dimension mismatch");
  if (!std::isfinite(w)) throw Error("SignedMeasure: weight must be finite");
  for (double c : v)
    if (!std::isfinite(c)) throw Error("SignedMeasure: velocity must be finite");
  velocities_.insert(velocities_.end(), v.begin(), v.end());
  weights_.push_back(w);
}

void SignedMeasure::reserve(std::size_t n) {
  velocities_.reserve(n * static_cast<std::size_t>(dim_));
  weights_.reserve(n);
}

SignedMeasure SignedMeasure::merged() const {
  std::map<Key, double> acc;
  std::vector<Key> order;
  for (std::size_t i = 0; i < size(); ++i) {
    Key k = bit_key(velocity(i));
    auto it = acc.find(k);
    if (it == acc.end()) {
      acc.emplace(k, weight(i));
      order.push_back(std::move(k));
    } else {
      it->second += weight(i);
    }
  }
  SignedMeasure out(dim_);
  out.reserve(order.size());
  Vec v(static_cast<std::size_t>(dim_));
  for (const Key& k : order) {
    const double w = acc[k];
    if (w == 0.0) continue;
    for (int i = 0; i < dim_; ++i) v[static_cast<std::size_t>(i)] = std::bit_cast<double>(k[i]);
    out.add_atom(v, w);
  }
  return out;
}

SignedMeasure SignedMeasure::merged_snapped(double eps) const {
  if (!(eps > 0.0)) throw Error("merged_snapped: eps must be positive");
  SignedMeasure snapped(dim_);
  snapped.reserve(size());
  Vec v(static_cast<std::size_t>(dim_));
  for (std::size_t i = 0; i < size(); ++i) {
    VecView u = velocity(i);
    for (int k = 0; k < dim_; ++k)
      v[static_cast<std::size_t>(k)] = std::round(u[static_cast<std::size_t>(k)] / eps) * eps;
    snapped.add_atom(v, weight(i));
  }
  return snapped.merged();
}

SignedMeasure& SignedMeasure::operator+=(const SignedMeasure& other) {
  if (other.dim_ != dim_) throw Error("SignedMeasure: dimension mismatch");
  velocities_.insert(velocities_.end(), other.velocities_.begin(), other.velocities_.end());
  weights_.insert(weights_.end(), other.weights_.begin(), other.weights_.end());
  return *this;
}

SignedMeasure SignedMeasure::scaled(double c) const {
  SignedMeasure out = *this;
  for (double& w : out.weights_) w *= c;
  return out;
}

DiscreteMeasure::DiscreteMeasure(int dimension) : signed_(dimension) {}

void DiscreteMeasure::add_atom(VecView v, double w) {
  if (w < 0.0) throw Error("DiscreteMeasure: weights must be nonnegative");
  signed_.add_atom(v, w);
}

DiscreteMeasure DiscreteMeasure::merged() const {
  return from_signed_positive(signed_.merged());
}

bool DiscreteMeasure::is_dirac() const {
  const DiscreteMeasure m = merged();
  return m.size() == 1;
}

DiscreteMeasure DiscreteMeasure::from_signed_positive(const SignedMeasure& m) {
  DiscreteMeasure out(m.dimension());
  out.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out.add_atom(m.velocity(i), m.weight(i));
  return out;
}

SignedMeasure difference(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dimension() != nu.dimension()) throw Error("difference: dimension mismatch");
  SignedMeasure d = mu.as_signed();
  d += nu.as_signed().scaled(-1.0);
  return d.merged();
}

namespace {

double moment_norm_impl(const SignedMeasure& m, double s) {
  std::vector<double> terms(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    terms[i] = std::abs(m.weight(i)) * bracket_pow(m.velocity(i), s);
  return pairwise_sum(terms);
}

}  // namespace

double moment_norm(const DiscreteMeasure& mu, double s) {
  if (!std::isfinite(s) || s < 0.0) throw Error("moment_norm: order must be finite and >= 0");
  return moment_norm_impl(mu.as_signed(), s);
}

double moment_norm(const SignedMeasure& mu, double s) {
  if (!std::isfinite(s) || s < 0.0) throw Error("moment_norm: order must be finite and >= 0");
  return moment_norm_impl(mu.merged(), s);
}

ConservedTriple conserved_triple(const DiscreteMeasure& mu) {
  ConservedTriple out;
  out.momentum.assign(static_cast<std::size_t>(mu.dimension()), 0.0);
  std::vector<double> mass_terms(mu.size()), energy_terms(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double w = mu.weight(i);
    VecView v = mu.velocity(i);
    mass_terms[i] = w;
    energy_terms[i] = w * norm2(v);
    for (std::size_t k = 0; k < v.size(); ++k) out.momentum[k] += w * v[k];
  }
  out.mass = pairwise_sum(mass_terms);
  out.energy = pairwise_sum(energy_terms);
  return out;
}

std::pair<DiscreteMeasure, DiscreteMeasure> jordan_decompose(const SignedMeasure& mu) {
  const SignedMeasure m = mu.merged();
  DiscreteMeasure pos(mu.dimension());
  DiscreteMeasure neg(mu.dimension());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double w = m.weight(i);
    if (w > 0.0)
      pos.add_atom(m.velocity(i), w);
    else if (w < 0.0)
      neg.add_atom(m.velocity(i), -w);
  }
  return {std::move(pos), std::move(neg)};
}

bool tv_identity_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double tol) {
  if (mu.dimension() != nu.dimension()) throw Error("tv_identity_check: dimension mismatch");
  const SignedMeasure d = difference(mu, nu);
  // |μ-ν| and (μ-ν)^+ on the merged grid.
  SignedMeasure lhs(mu.dimension());
  SignedMeasure plus(mu.dimension());
  for (std::size_t i = 0; i < d.size(); ++i) {
    lhs.add_atom(d.velocity(i), std::abs(d.weight(i)));
    if (d.weight(i) > 0.0) plus.add_atom(d.velocity(i), d.weight(i));
  }
  // rhs = ν - μ + 2(μ-ν)^+
  SignedMeasure rhs = nu.as_signed();
  rhs += mu.as_signed().scaled(-1.0);
  rhs += plus.scaled(2.0);
  SignedMeasure gap = lhs;
  gap += rhs.scaled(-1.0);
  const SignedMeasure residual = gap.merged();
  for (std::size_t i = 0; i < residual.size(); ++i)
    if (std::abs(residual.weight(i)) > tol) return false;
  return true;
}

double psi_localization(const DiscreteMeasure& mu, double r) {
  if (r < 0.0) throw Error("psi_localization: r must be >= 0");
  if (r == 0.0) return 0.0;
  const double cutoff = std::pow(r, -1.0 / 3.0);
  const double cutoff2 = cutoff * cutoff;
  std::vector<double> terms;
  terms.reserve(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double v2 = norm2(mu.velocity(i));
    if (v2 > cutoff2) terms.push_back(mu.weight(i) * v2);
  }
  return r + std::cbrt(r) + pairwise_sum(terms);
}

double exponential_moment(const DiscreteMeasure& mu, double a, double gamma,
                          double exponent_cap) {
  if (a < 0.0) throw Error("exponential_moment: a must be >= 0");
  if (!(gamma > 0.0) || gamma > 2.0)
    throw Error("exponential_moment: gamma must be in (0, 2]");
  std::vector<double> terms(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double expo = a * bracket_pow(mu.velocity(i), gamma);
    if (expo > exponent_cap)
      throw OverflowError("exponential_moment: exponent exceeds cap");
    terms[i] = mu.weight(i) * std::exp(expo);
  }
  return pairwise_sum(terms);
}

TestDictionary TestDictionary::standard(int dimension) {
  TestDictionary dict;
  dict.entries.push_back({"const_1", [](VecView) { return 1.0; }, 0.0, 1.0});
  for (int k = 0; k < dimension; ++k) {
    dict.entries.push_back({"coord_v" + std::to_string(k + 1),
                            [k](VecView v) { return v[static_cast<std::size_t>(k)]; }, 1.0,
                            1.0});
  }
  dict.entries.push_back({"speed_sq", [](VecView v) { return norm2(v); }, 2.0, 1.0});
  dict.entries.push_back(
      {"gaussian", [](VecView v) { return std::exp(-0.5 * norm2(v)); }, 0.0, 1.0});
  // Fixed oscillatory probes; frequencies from a fixed-seed stream so the
  // dictionary is identical across runs and platforms.
  RngStream rng(0x0DDC0FFEEULL);
  for (int j = 0; j < 8; ++j) {
    Vec xi(static_cast<std::size_t>(dimension));
    for (double& c : xi) c = rng.uniform(-2.0, 2.0);
    dict.entries.push_back({"cos_xi" + std::to_string(j + 1),
                            [xi](VecView v) { return std::cos(dot(xi, v)); }, 0.0, 1.0});
  }
  return dict;
}

double TestDictionary::validate(int dimension, double radius, int samples_per_axis) const {
  double worst = 0.0;
  Vec v(static_cast<std::size_t>(dimension), 0.0);
  const std::size_t total =
      static_cast<std::size_t>(std::pow(samples_per_axis, dimension));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int k = 0; k < dimension; ++k) {
      const int j = static_cast<int>(rem % static_cast<std::size_t>(samples_per_axis));
      rem /= static_cast<std::size_t>(samples_per_axis);
      v[static_cast<std::size_t>(k)] =
          -radius + 2.0 * radius * j / (samples_per_axis - 1.0);
    }
    for (const TestFunctionEntry& e : entries) {
      const double ratio =
          std::abs(e.phi(v)) / (bracket_pow(v, e.weight_order) * e.sup_norm);
      worst = std::max(worst, ratio);
    }
  }
  return worst;
}

double integrate(const DiscreteMeasure& mu, const std::function<double(VecView)>& phi) {
  std::vector<double> terms(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) terms[i] = mu.weight(i) * phi(mu.velocity(i));
  return pairwise_sum(terms);
}

double dictionary_distance(const DiscreteMeasure& f, const DiscreteMeasure& g,
                           const TestDictionary& dict) {
  if (f.dimension() != g.dimension()) throw Error("dictionary_distance: dimension mismatch");
  if (dict.entries.empty()) throw Error("dictionary_distance: empty dictionary");
  double best = 0.0;
  for (const TestFunctionEntry& e : dict.entries) {
    if (e.weight_order > 2.0)
      throw Error("dictionary_distance: weight_order must be <= 2");
    const double gap = std::abs(integrate(f, e.phi) - integrate(g, e.phi)) / e.sup_norm;
    best = std::max(best, gap);
  }
  return best;
}

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

nlohmann::json measure_json(const SignedMeasure& mu) {
  nlohmann::json atoms = nlohmann::json::array();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (double c : mu.velocity(i)) row.push_back(c);
    row.push_back(mu.weight(i));
    atoms.push_back(std::move(row));
  }
  return nlohmann::json{{"dimension", mu.dimension()}, {"atoms", std::move(atoms)}};
}

SignedMeasure measure_from_json_impl(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("dimension") || !j.contains("atoms"))
    throw Error("measure JSON: expected keys dimension, atoms");
  const int dim = j.at("dimension").get<int>();
  SignedMeasure out(dim);
  Vec v(static_cast<std::size_t>(dim));
  for (const auto& row : j.at("atoms")) {
    if (static_cast<int>(row.size()) != dim + 1)
      throw Error("measure JSON: atom row must have N velocity entries plus weight");
    for (int k = 0; k < dim; ++k) v[static_cast<std::size_t>(k)] = row.at(k).get<double>();
    out.add_atom(v, row.at(dim).get<double>());
  }
  return out;
}

}  // namespace

std::string to_json(const SignedMeasure& mu) { return measure_json(mu).dump(); }

std::string to_json(const DiscreteMeasure& mu) { return measure_json(mu.as_signed()).dump(); }

SignedMeasure signed_measure_from_json(const std::string& text) {
  return measure_from_json_impl(text);
}

DiscreteMeasure measure_from_json(const std::string& text) {
  return DiscreteMeasure::from_signed_positive(measure_from_json_impl(text));
}

void write_csv(std::ostream& os, const DiscreteMeasure& mu) {
  for (int k = 0; k < mu.dimension(); ++k) os << "v" << (k + 1) << ",";
  os << "w\n";
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (double c : mu.velocity(i)) os << format_double(c) << ",";
    os << format_double(mu.weight(i)) << "\n";
  }
}

DiscreteMeasure measure_from_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("measure CSV: empty input");
  int dim = 0;
  {
    std::stringstream header(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(header, col, ',')) cols.push_back(col);
    if (cols.empty() || cols.back() != "w") throw Error("measure CSV: bad header");
    dim = static_cast<int>(cols.size()) - 1;
  }
  DiscreteMeasure out(dim);
  Vec v(static_cast<std::size_t>(dim));
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    for (int k = 0; k < dim; ++k) {
      if (!std::getline(row, cell, ',')) throw Error("measure CSV: short row");
      v[static_cast<std::size_t>(k)] = std::stod(cell);
    }
    if (!std::getline(row, cell, ',')) throw Error("measure CSV: missing weight");
    out.add_atom(v, std::stod(cell));
  }
  return out;
}

}  // namespace boltz
