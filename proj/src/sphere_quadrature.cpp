// SPDX-License-Identifier: Apache-2.0
#include "boltz/sphere_quadrature.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "boltz/error.hpp"
#include "boltz/quadrature.hpp"

namespace boltz {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<SphereQuadrature::ThetaNode> build_theta(int dimension,
                                                     const std::vector<double>& edges,
                                                     int per_panel) {
  const GaussRule& rule = gauss_legendre(per_panel);
  std::vector<SphereQuadrature::ThetaNode> nodes;
  nodes.reserve((edges.size() - 1) * static_cast<std::size_t>(per_panel));
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p], b = edges[p + 1];
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < per_panel; ++i) {
      const double theta = c + h * rule.nodes[static_cast<std::size_t>(i)];
      const double w = h * rule.weights[static_cast<std::size_t>(i)] *
                       std::pow(std::sin(theta), dimension - 2.0);
      nodes.push_back({theta, w});
    }
  }
  return nodes;
}

}  // namespace

SphereQuadrature SphereQuadrature::uniform(int dimension, int theta_nodes,
                                           int azimuth_nodes) {
  if (dimension != 2 && dimension != 3)
    throw Error("SphereQuadrature: only dimensions 2 and 3 are supported");
  if (theta_nodes < 4) throw Error("SphereQuadrature: need at least 4 theta nodes");
  SphereQuadrature q;
  q.dim_ = dimension;
  q.graded_ = false;
  q.theta_count_ = theta_nodes;

  // 8 nodes per panel unless the budget is small.
  const int per_panel = theta_nodes >= 16 ? 8 : 4;
  const int panels = std::max(1, theta_nodes / per_panel);
  std::vector<double> edges(static_cast<std::size_t>(panels) + 1);
  for (int p = 0; p <= panels; ++p)
    edges[static_cast<std::size_t>(p)] = kPi * static_cast<double>(p) / panels;
  q.theta_ = build_theta(dimension, edges, per_panel);

  if (dimension == 2) {
    q.azimuth_count_ = 2;
    q.azimuth_ = {0.0, kPi};
    q.azimuth_weight_ = 1.0;
  } else {
    if (azimuth_nodes < 2) throw Error("SphereQuadrature: need at least 2 azimuth nodes");
    q.azimuth_count_ = azimuth_nodes;
    q.azimuth_.resize(static_cast<std::size_t>(azimuth_nodes));
    for (int j = 0; j < azimuth_nodes; ++j)
      q.azimuth_[static_cast<std::size_t>(j)] = 2.0 * kPi * (j + 0.5) / azimuth_nodes;
    q.azimuth_weight_ = 2.0 * kPi / azimuth_nodes;
  }
  return q;
}

SphereQuadrature SphereQuadrature::graded(int dimension, int theta_nodes,
                                          int azimuth_nodes) {
  SphereQuadrature q = uniform(dimension, std::max(theta_nodes, 16), azimuth_nodes);
  q.graded_ = true;
  q.theta_count_ = theta_nodes;
  const int per_panel = 6;
  int levels = theta_nodes / (2 * per_panel) - 1;
  if (levels < 4) levels = 4;
  // Geometric breakpoints toward 0, mirrored onto (pi/2, pi); the innermost
  // panel still starts at 0 so the rule covers all of (0, pi).
  std::vector<double> edges;
  edges.push_back(0.0);
  for (int k = levels; k >= 0; --k) edges.push_back(0.5 * kPi * std::pow(0.5, k));
  const std::size_t half = edges.size();
  for (std::size_t i = half - 1; i-- > 0;) edges.push_back(kPi - edges[i]);
  q.theta_ = build_theta(dimension, edges, per_panel);
  return q;
}

SphereQuadrature SphereQuadrature::refined() const {
  const int th = 2 * std::max(theta_count_, 8);
  const int az = dim_ == 2 ? 2 : 2 * azimuth_count_;
  return graded_ ? graded(dim_, th, az) : uniform(dim_, th, az);
}

double SphereQuadrature::total_weight() const {
  double s = 0.0;
  for (const ThetaNode& n : theta_) s += n.weight;
  const double az_total =
      dim_ == 2 ? 2.0 : azimuth_weight_ * static_cast<double>(azimuth_.size());
  return s * az_total;
}

std::string SphereQuadrature::to_json() const {
  nlohmann::json j{{"theta_nodes", theta_count_},
                   {"azimuth_nodes", azimuth_count_},
                   {"graded", graded_}};
  return j.dump();
}

}  // namespace boltz
