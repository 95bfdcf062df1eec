#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gossip/errors.hpp"
#include "gossip/graph.hpp"

namespace gossip {

template <typename Scalar>
struct EigenResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;                // ascending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // columns
  Scalar residual = Scalar(0);                                     // max |Mv - lambda v|
  int sweeps = 0;
};

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// The input is symmetrized as (M + M^T) / 2 first. Sweeps continue until the
/// off-diagonal Frobenius mass drops to 1e-14 * ||M||_F, or until a sweep
/// finds nothing left to rotate. Throws NumericError on non-finite input, on
/// asymmetry beyond 1e-10 * ||M||_F, or after 50 sweeps without convergence.
template <typename Derived>
EigenResult<typename Derived::Scalar> eig_sym(const Eigen::MatrixBase<Derived>& m_in) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using std::abs;
  using std::sqrt;

  if (m_in.rows() != m_in.cols()) throw StructuralError("eig_sym: matrix must be square");
  if (!m_in.allFinite()) throw NumericError("eig_sym: non-finite entries");
  const Eigen::Index n = m_in.rows();

  const Scalar norm = m_in.norm();
  if ((m_in - m_in.transpose()).norm() > Scalar(1e-10) * norm) {
    throw NumericError("eig_sym: matrix is not symmetric");
  }
  Mat a = (m_in + m_in.transpose()) / Scalar(2);
  Mat v = Mat::Identity(n, n);

  auto off_mass = [&]() {
    Scalar s(0);
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) s += Scalar(2) * a(p, q) * a(p, q);
    return sqrt(s);
  };

  constexpr int kMaxSweeps = 50;
  const Scalar target = Scalar(1e-14) * norm;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  int sweep = 0;
  for (; sweep <= kMaxSweeps; ++sweep) {
    if (off_mass() <= target) break;
    if (sweep == kMaxSweeps) throw NumericError("eig_sym: Jacobi iteration did not converge");
    bool rotated = false;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        // Far below the convergence target: zero it and move on.
        if (abs(apq) <= Scalar(1e-2) * eps * norm) {
          a(p, q) = a(q, p) = Scalar(0);
          continue;
        }
        rotated = true;
        const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
        const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) /
                         (abs(theta) + sqrt(theta * theta + Scalar(1)));
        const Scalar c = Scalar(1) / sqrt(t * t + Scalar(1));
        const Scalar s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = Scalar(0);
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  EigenResult<Scalar> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  out.sweeps = sweep;
  const Mat sym = (m_in + m_in.transpose()) / Scalar(2);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar r = (sym * out.vectors.col(k) - out.values(k) * out.vectors.col(k))
                         .cwiseAbs()
                         .maxCoeff();
    out.residual = std::max(out.residual, r);
  }
  return out;
}

template <typename Scalar>
struct PsdResult {
  bool psd = true;
  Scalar min_eig = Scalar(0);
  Scalar scale = Scalar(1);  // max(1, spectral norm)
};

/// psd iff min_eig >= -tol * max(1, ||M||_2).
template <typename Derived>
PsdResult<typename Derived::Scalar> is_psd(const Eigen::MatrixBase<Derived>& m,
                                           typename Derived::Scalar tol) {
  using Scalar = typename Derived::Scalar;
  PsdResult<Scalar> out;
  if (m.size() == 0) return out;
  const auto eig = eig_sym(m);
  out.min_eig = eig.values(0);
  const Scalar spectral_norm =
      std::max(std::abs(eig.values(0)), std::abs(eig.values(eig.values.size() - 1)));
  out.scale = std::max(Scalar(1), spectral_norm);
  out.psd = out.min_eig >= -tol * out.scale;
  return out;
}

struct GraphSpectrum {
  Vector laplacian_values;  // full Laplacian spectrum, ascending
  Vector lambda_list;       // nonzero Laplacian eigenvalues, ascending
  double lambda_1 = 0.0;    // smallest nonzero
  double lambda_last = 0.0;
  double esr = 0.0;
  bool connected = false;   // exactly n-1 nonzero Laplacian eigenvalues
};

/// Laplacian spectrum and esr(W) of a symmetric weighted graph.
///
/// esr is the second-largest distinct absolute eigenvalue of W (distinct up to
/// 1e-9 * ||W||); when every eigenvalue has the same modulus it is that modulus.
GraphSpectrum graph_spectrum(const WeightedGraph& g);

}  // namespace gossip
