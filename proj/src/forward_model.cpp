// Copyright 2026 The reckga Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "reckga/forward_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace reckga {

MeasurementSet::MeasurementSet(int m, Eigen::MatrixXd p_value, Eigen::MatrixXd p_error,
                               std::vector<VisibilityEntry> visibilities)
    : m_(m), p_(std::move(p_value)), dp_(std::move(p_error)), v_(std::move(visibilities)) {
  if (m_ < 2) throw ShapeError("measurement set needs m >= 2");
  if (p_.rows() != m_ || p_.cols() != m_ || dp_.rows() != m_ || dp_.cols() != m_)
    throw ShapeError("single-photon table must be " + std::to_string(m_) + "x" + std::to_string(m_));
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) {
      const double v = p_(i, j);
      const double e = dp_(i, j);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw DomainError("probability P(" + std::to_string(i) + "," + std::to_string(j) +
                          ") outside [0, 1]");
      if (!std::isfinite(e) || e <= 0.0)
        throw DomainError("probability error must be positive");
    }
  const int pairs = pair_count(m_);
  lookup_.assign(static_cast<std::size_t>(pairs * pairs), -1);
  for (std::size_t k = 0; k < v_.size(); ++k) {
    const auto& e = v_[k];
    if (e.i < 0 || e.j >= m_ || e.i >= e.j || e.p < 0 || e.q >= m_ || e.p >= e.q)
      throw DomainError("visibility entry needs 0 <= i < j < m and 0 <= p < q < m");
    if (!std::isfinite(e.value) || e.value > 1.0) throw DomainError("visibility above 1");
    if (!std::isfinite(e.error) || e.error <= 0.0)
      throw DomainError("visibility error must be positive");
    auto& slot = lookup_[static_cast<std::size_t>(pair_index(e.i, e.j, m_) * pairs +
                                                  pair_index(e.p, e.q, m_))];
    if (slot >= 0) throw DomainError("duplicate visibility entry");
    slot = static_cast<int>(k);
  }
}

const VisibilityEntry* MeasurementSet::find(int i, int j, int p, int q) const {
  if (i > j) std::swap(i, j);
  if (p > q) std::swap(p, q);
  if (i == j || p == q || i < 0 || p < 0 || j >= m_ || q >= m_) return nullptr;
  const int pairs = pair_count(m_);
  const int slot = lookup_[static_cast<std::size_t>(pair_index(i, j, m_) * pairs + pair_index(p, q, m_))];
  return slot < 0 ? nullptr : &v_[static_cast<std::size_t>(slot)];
}

Eigen::MatrixXd predict_single(const UnitaryMatrix& u) {
  return u.matrix().cwiseAbs2().transpose();
}

TwoPhotonPrediction predict_two_photon(const ComplexMatrix& u, int i, int j, int p, int q) {
  const Complex direct = u(p, i) * u(q, j);
  const Complex exchange = u(p, j) * u(q, i);
  TwoPhotonPrediction out;
  out.distinguishable = std::norm(direct) + std::norm(exchange);
  out.indistinguishable = std::norm(direct + exchange);
  out.defined = out.distinguishable >= kDistinguishableFloor;
  if (out.defined) {
    // P^d - P^q = -2 Re(direct * conj(exchange)); avoids cancellation.
    // 0.0 - x keeps an exact zero positive.
    out.visibility = (0.0 - 2.0 * std::real(direct * std::conj(exchange))) / out.distinguishable;
  }
  return out;
}

std::vector<VisibilityEntry> predict_visibilities(const UnitaryMatrix& u, std::vector<bool>* defined) {
  const int m = u.dim();
  std::vector<VisibilityEntry> out;
  out.reserve(static_cast<std::size_t>(pair_count(m) * pair_count(m)));
  if (defined) defined->clear();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int p = 0; p < m; ++p)
        for (int q = p + 1; q < m; ++q) {
          const TwoPhotonPrediction t = predict_two_photon(u.matrix(), i, j, p, q);
          out.push_back({i, j, p, q, t.visibility, 0.0});
          if (defined) defined->push_back(t.defined);
        }
  return out;
}

void NoiseConfig::validate() const {
  if (!noiseless && shots <= 0) throw ConfigError("shots must be positive");
  if (!(sigma_v >= 0.0) || !std::isfinite(sigma_v)) throw ConfigError("sigma_v must be >= 0");
  if (!(p_error_floor > 0.0) || !(v_error_floor > 0.0))
    throw ConfigError("error floors must be positive");
}

MeasurementSet simulate_measurements(const UnitaryMatrix& u, const NoiseConfig& noise, Rng& rng) {
  noise.validate();
  const int m = u.dim();
  const Eigen::MatrixXd exact = predict_single(u);
  Eigen::MatrixXd p = exact;
  Eigen::MatrixXd dp = Eigen::MatrixXd::Constant(m, m, noise.p_error_floor);

  if (!noise.noiseless) {
    const double n = static_cast<double>(noise.shots);
    for (int i = 0; i < m; ++i) {
      // Multinomial draw as a chain of conditional binomials.
      long remaining = noise.shots;
      double mass = 1.0;
      for (int j = 0; j < m; ++j) {
        long count = 0;
        if (j == m - 1) {
          count = remaining;
        } else if (remaining > 0 && mass > 0.0) {
          const double prob = std::clamp(exact(i, j) / mass, 0.0, 1.0);
          std::binomial_distribution<long> draw(remaining, prob);
          count = draw(rng);
        }
        remaining -= count;
        mass -= exact(i, j);
        const double phat = static_cast<double>(count) / n;
        p(i, j) = phat;
        dp(i, j) = std::max(std::sqrt(phat * (1.0 - phat) / n), noise.p_error_floor);
      }
    }
  }

  std::vector<bool> defined;
  std::vector<VisibilityEntry> all = predict_visibilities(u, &defined);
  std::vector<VisibilityEntry> kept;
  kept.reserve(all.size());
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double dv = std::max(noise.noiseless ? 0.0 : noise.sigma_v, noise.v_error_floor);
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (!defined[k]) continue;
    VisibilityEntry e = all[k];
    if (!noise.noiseless && noise.sigma_v > 0.0)
      e.value = std::min(1.0, e.value + noise.sigma_v * gauss(rng));
    e.error = dv;
    kept.push_back(e);
  }
  return MeasurementSet(m, std::move(p), std::move(dp), std::move(kept));
}

}  // namespace reckga
