#include "gossip/spectral.hpp"

namespace gossip {

GraphSpectrum graph_spectrum(const WeightedGraph& g) {
  const Matrix& w = g.weights();
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw StructuralError("graph_spectrum: graph is not symmetric");
  }
  GraphSpectrum out;
  const Matrix l = laplacian(w);
  const auto leig = eig_sym(l);
  out.laplacian_values = leig.values;

  const double zero_tol = 1e-9 * l.norm();
  std::vector<double> nonzero;
  for (Eigen::Index k = 0; k < leig.values.size(); ++k) {
    if (std::abs(leig.values(k)) > zero_tol) nonzero.push_back(leig.values(k));
  }
  out.lambda_list = Eigen::Map<const Vector>(nonzero.data(), static_cast<Eigen::Index>(nonzero.size()));
  if (!nonzero.empty()) {
    out.lambda_1 = nonzero.front();
    out.lambda_last = nonzero.back();
  }
  out.connected = static_cast<Eigen::Index>(nonzero.size()) == g.n() - 1;

  const auto weig = eig_sym(w);
  std::vector<double> mags(static_cast<std::size_t>(weig.values.size()));
  for (std::size_t k = 0; k < mags.size(); ++k) mags[k] = std::abs(weig.values(static_cast<Eigen::Index>(k)));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  const double same_tol = 1e-9 * std::max(1.0, w.norm());
  out.esr = mags.front();
  for (double m : mags) {
    if (mags.front() - m > same_tol) {
      out.esr = m;
      break;
    }
  }
  return out;
}

}  // namespace gossip
