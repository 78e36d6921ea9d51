#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Deliberately naive: dense matrices, textbook formulas, O(n^4) DFTs.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cacti/core.hpp"
#include "cacti/forward_model.hpp"
#include "cacti/gap_solver.hpp"

namespace oracle {

// Small generator for property tests.
struct Gen {
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  cacti::Rng rng;

  std::size_t size(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1));
  }
  double real(double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }
  cacti::Cube cube(std::size_t r, std::size_t c, std::size_t f, double lo = -1.0, double hi = 1.0) {
    cacti::Cube out(r, c, f);
    for (double& v : out.values()) v = real(lo, hi);
    return out;
  }
  // Random code planes in [0, 1]; roughly half binary, half grayscale.
  cacti::ForwardOperator op(std::size_t r, std::size_t c, std::size_t f) {
    cacti::Cube planes(r, c, f);
    const bool binary = rng.uniform() < 0.5;
    for (double& v : planes.values()) v = binary ? (rng.uniform() < 0.5 ? 1.0 : 0.0) : rng.uniform();
    return cacti::ForwardOperator(planes);
  }
};

// Dense H built entry by entry from the code planes.
inline Eigen::MatrixXd dense_h(const cacti::ForwardOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.pixels());
  const auto nf = static_cast<Eigen::Index>(op.frames());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n * nf);
  for (Eigen::Index k = 0; k < nf; ++k)
    for (std::size_t i = 0; i < op.rows(); ++i)
      for (std::size_t j = 0; j < op.cols(); ++j) {
        const auto p = static_cast<Eigen::Index>(i * op.cols() + j);
        h(p, k * n + p) = op.planes()(i, j, static_cast<std::size_t>(k));
      }
  return h;
}

inline Eigen::VectorXd vec(const cacti::Cube& c) {
  return Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
}

inline cacti::Cube unvec(const Eigen::VectorXd& v, std::size_t r, std::size_t c, std::size_t f) {
  cacti::Cube out(r, c, f);
  std::copy(v.data(), v.data() + v.size(), out.values().begin());
  return out;
}

// Minimum-norm correction f = theta + H^T (H H^T)^{-1} (g - H theta).
inline cacti::Cube manifold_projection(const cacti::ForwardOperator& op, const cacti::Cube& g,
                                       const cacti::Cube& theta) {
  const Eigen::MatrixXd h = dense_h(op);
  const Eigen::VectorXd t = vec(theta);
  const Eigen::MatrixXd hht = h * h.transpose();
  const Eigen::VectorXd y = hht.ldlt().solve(vec(g) - h * t);
  return unvec(t + h.transpose() * y, theta.rows(), theta.cols(), theta.frames());
}

// DCT-II by the textbook formula with orthonormal scaling.
inline Eigen::MatrixXd dct_matrix(std::size_t n) {
  Eigen::MatrixXd m(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j) {
      const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      m(k, j) = scale * std::cos(std::numbers::pi * (2.0 * j + 1.0) * k / (2.0 * n));
    }
  return m;
}

// Haar analysis by repeated pairwise averaging and differencing.
inline std::vector<double> haar_forward(std::vector<double> x) {
  std::vector<double> tmp(x.size());
  for (std::size_t len = x.size(); len > 1; len /= 2) {
    for (std::size_t i = 0; i < len / 2; ++i) {
      tmp[i] = (x[2 * i] + x[2 * i + 1]) / std::sqrt(2.0);
      tmp[len / 2 + i] = (x[2 * i] - x[2 * i + 1]) / std::sqrt(2.0);
    }
    std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(len), x.begin());
  }
  return x;
}

inline Eigen::MatrixXd haar_matrix(std::size_t n) {
  Eigen::MatrixXd m(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    const auto col = haar_forward(e);
    for (std::size_t i = 0; i < n; ++i) m(i, j) = col[i];
  }
  return m;
}

// Expected post-projection group norms: sort by norm / beta, cover N indices,
// threshold every group at beta * (reference level).
inline std::vector<double> thresholded_norms(const std::vector<double>& norms, const std::vector<double>& beta,
                                             const std::vector<std::size_t>& sizes, std::size_t measurements) {
  std::vector<std::pair<double, std::size_t>> keyed;
  for (std::size_t l = 0; l < norms.size(); ++l) keyed.emplace_back(-norms[l] / beta[l], l);
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t covered = 0;
  double level = 0.0;
  for (std::size_t q = 0; q < keyed.size(); ++q) {
    covered += sizes[keyed[q].second];
    if (covered >= measurements) {
      level = q + 1 < keyed.size() ? -keyed[q + 1].first : 0.0;
      break;
    }
  }
  std::vector<double> out(norms.size());
  for (std::size_t l = 0; l < norms.size(); ++l) out[l] = std::max(norms[l] - beta[l] * level, 0.0);
  return out;
}

inline Eigen::MatrixXcd direct_dft2(const Eigen::MatrixXd& f) {
  const auto nx = f.rows();
  const auto nt = f.cols();
  Eigen::MatrixXcd out(nx, nt);
  for (Eigen::Index u = 0; u < nx; ++u)
    for (Eigen::Index v = 0; v < nt; ++v) {
      std::complex<double> acc = 0.0;
      for (Eigen::Index x = 0; x < nx; ++x)
        for (Eigen::Index t = 0; t < nt; ++t) {
          const double phase = -2.0 * std::numbers::pi *
                               (static_cast<double>(u * x) / static_cast<double>(nx) +
                                static_cast<double>(v * t) / static_cast<double>(nt));
          acc += f(x, t) * std::polar(1.0, phase);
        }
      out(u, v) = acc;
    }
  return out;
}

}  // namespace oracle
