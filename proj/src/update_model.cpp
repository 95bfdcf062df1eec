#include "gossip/update_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "gossip/errors.hpp"

namespace gossip {

namespace {

constexpr double kConstraintTol = 1e-10;

std::string fmt_size(double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, s < 1e15 ? "%.0f" : "%.6g", s);
  return buf;
}

void canonicalize(LaplacianEvent& e) {
  std::sort(e.coeffs.begin(), e.coeffs.end(), [](const Coefficient& a, const Coefficient& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });
}

// Drops null-probability outcomes and merges outcomes with identical L.
std::vector<LaplacianEvent> merge_events(std::vector<LaplacianEvent> raw) {
  using Key = std::vector<std::tuple<Eigen::Index, Eigen::Index, double>>;
  std::map<Key, std::size_t> index;
  std::vector<LaplacianEvent> out;
  for (auto& e : raw) {
    if (e.probability <= 0.0) continue;
    canonicalize(e);
    Key key;
    key.reserve(e.coeffs.size());
    for (const auto& c : e.coeffs) key.emplace_back(c.row, c.col, c.value);
    auto [it, inserted] = index.emplace(std::move(key), out.size());
    if (inserted) {
      out.push_back(std::move(e));
    } else {
      out[it->second].probability += e.probability;
    }
  }
  return out;
}

}  // namespace

ModelKind parse_model_kind(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "AAGA") return ModelKind::kAAGA;
  if (up == "BGA") return ModelKind::kBGA;
  if (up == "SAGA") return ModelKind::kSAGA;
  if (up == "PBGA") return ModelKind::kPBGA;
  throw StructuralError("unknown model kind '" + std::string(name) + "'");
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kAAGA: return "AAGA";
    case ModelKind::kBGA: return "BGA";
    case ModelKind::kSAGA: return "SAGA";
    case ModelKind::kPBGA: return "PBGA";
  }
  return "?";
}

std::string_view to_string(MomentSource source) {
  switch (source) {
    case MomentSource::kClosedForm: return "closed_form";
    case MomentSource::kEnumeration: return "enumeration";
    case MomentSource::kEmpirical: return "empirical";
  }
  return "?";
}

Matrix LaplacianEvent::dense() const {
  Matrix l = Matrix::Zero(n, n);
  for (const auto& c : coeffs) {
    l(c.row, c.col) -= c.value;
    l(c.row, c.row) += c.value;
  }
  return l;
}

void LaplacianEvent::apply(Vector& x) const {
  std::vector<double> scratch;
  apply_tracking_sum(x, scratch);
}

double LaplacianEvent::apply_tracking_sum(Vector& x, std::vector<double>& scratch) const {
  scratch.resize(coeffs.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const auto& c = coeffs[k];
    scratch[k] = c.value * (x(c.col) - x(c.row));
  }
  double total = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    x(coeffs[k].row) += scratch[k];
    total += scratch[k];
  }
  return total;
}

UpdateModel::UpdateModel(ModelKind kind, WeightedGraph graph, double q, bool allow_degenerate)
    : kind_(kind), graph_(std::move(graph)), q_(q) {
  if (!std::isfinite(q) || q <= 0.0 || q > 1.0 || (q == 1.0 && !allow_degenerate)) {
    throw StructuralError(
        "model: q must lie in (0,1); q = 1 admits no accuracy certificate (two-node AAGA with "
        "q = 1 has no valid gamma) and needs allow_degenerate");
  }
  const Matrix& w = graph_.weights();
  const Eigen::Index n = graph_.n();
  switch (kind_) {
    case ModelKind::kAAGA: {
      const double total = w.sum();
      if (std::abs(total - 1.0) > kConstraintTol) {
        throw StructuralError("AAGA: edge probabilities must satisfy 1^T W 1 = 1 (got " +
                              fmt_size(total) + ")");
      }
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          if (w(i, j) > 0.0) {
            acc += w(i, j);
            edges_.emplace_back(i, j);
            edge_cdf_.push_back(acc);
          }
      break;
    }
    case ModelKind::kBGA:
    case ModelKind::kPBGA: {
      if (kind_ == ModelKind::kBGA && ((w.array() != 0.0) && (w.array() != 1.0)).any()) {
        throw StructuralError("BGA: W entries must be 0 or 1");
      }
      if (kind_ == ModelKind::kPBGA && (w.array() > 1.0).any()) {
        throw StructuralError("PBGA: W entries must be probabilities in [0,1]");
      }
      choices_.resize(static_cast<std::size_t>(n));
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
          if (i != j && w(i, j) > 0.0) choices_[static_cast<std::size_t>(j)].push_back({i, w(i, j)});
      break;
    }
    case ModelKind::kSAGA: {
      choices_.resize(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) {
        const double row = w.row(i).sum();
        if (row == 0.0) {
          throw StructuralError("SAGA: row " + std::to_string(i) + " of W has zero total mass");
        }
        if (std::abs(row - 1.0) > kConstraintTol) {
          throw StructuralError("SAGA: W must be row-stochastic (row " + std::to_string(i) +
                                " sums to " + fmt_size(row) + ")");
        }
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
          if (w(i, j) > 0.0) {
            acc += w(i, j);
            choices_[static_cast<std::size_t>(i)].push_back({j, acc});
          }
      }
      break;
    }
  }
}

namespace {

template <typename Cdf>
std::size_t pick(const Cdf& cdf, std::size_t size, double u) {
  std::size_t lo = 0, hi = size - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (u < cdf(mid)) hi = mid; else lo = mid + 1;
  }
  return lo;
}

}  // namespace

void UpdateModel::sample_into(CounterRng& rng, LaplacianEvent& out) const {
  out.probability = -1.0;
  out.n = n();
  out.coeffs.clear();
  switch (kind_) {
    case ModelKind::kAAGA: {
      const double u = rng.uniform() * edge_cdf_.back();
      const auto k = pick([&](std::size_t m) { return edge_cdf_[m]; }, edge_cdf_.size(), u);
      const auto [i, j] = edges_[k];
      if (i != j) out.coeffs.push_back({i, j, q_});
      break;
    }
    case ModelKind::kBGA: {
      const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n())));
      for (const auto& c : choices_[static_cast<std::size_t>(j)]) out.coeffs.push_back({c.node, j, q_});
      break;
    }
    case ModelKind::kPBGA: {
      const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n())));
      for (const auto& c : choices_[static_cast<std::size_t>(j)])
        if (rng.uniform() < c.prob) out.coeffs.push_back({c.node, j, q_});
      break;
    }
    case ModelKind::kSAGA: {
      for (Eigen::Index i = 0; i < n(); ++i) {
        const auto& row = choices_[static_cast<std::size_t>(i)];
        const double u = rng.uniform() * row.back().prob;
        const auto k = pick([&](std::size_t m) { return row[m].prob; }, row.size(), u);
        if (row[k].node != i) out.coeffs.push_back({i, row[k].node, q_});
      }
      break;
    }
  }
}

LaplacianEvent UpdateModel::sample(CounterRng& rng) const {
  LaplacianEvent e;
  sample_into(rng, e);
  return e;
}

double UpdateModel::support_size() const {
  switch (kind_) {
    case ModelKind::kAAGA: return static_cast<double>(edges_.size());
    case ModelKind::kBGA: return static_cast<double>(n());
    case ModelKind::kPBGA: {
      double s = 0.0;
      for (const auto& c : choices_) s += std::ldexp(1.0, static_cast<int>(c.size()));
      return s;
    }
    case ModelKind::kSAGA: {
      double s = 1.0;
      for (const auto& c : choices_) s *= static_cast<double>(c.size());
      return s;
    }
  }
  return 0.0;
}

std::vector<LaplacianEvent> enumerate_events(const UpdateModel& model, double budget) {
  const double support = model.support_size();
  if (support > budget) {
    throw CapacityError("enumerate_events: support size " + fmt_size(support) +
                        " exceeds budget " + fmt_size(budget));
  }
  const Eigen::Index n = model.n();
  const Matrix& w = model.weights();
  const double q = model.q();
  std::vector<LaplacianEvent> raw;
  auto make = [&](double p) {
    LaplacianEvent e;
    e.probability = p;
    e.n = n;
    return e;
  };

  switch (model.kind()) {
    case ModelKind::kAAGA:
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          if (w(i, j) > 0.0) {
            auto e = make(w(i, j));
            if (i != j) e.coeffs.push_back({i, j, q});
            raw.push_back(std::move(e));
          }
      break;
    case ModelKind::kBGA:
      for (Eigen::Index j = 0; j < n; ++j) {
        auto e = make(1.0 / static_cast<double>(n));
        for (Eigen::Index i = 0; i < n; ++i)
          if (i != j && w(i, j) > 0.0) e.coeffs.push_back({i, j, q});
        raw.push_back(std::move(e));
      }
      break;
    case ModelKind::kPBGA:
      for (Eigen::Index j = 0; j < n; ++j) {
        std::vector<Eigen::Index> recv;
        for (Eigen::Index i = 0; i < n; ++i)
          if (i != j && w(i, j) > 0.0) recv.push_back(i);
        const std::uint64_t subsets = std::uint64_t{1} << recv.size();
        for (std::uint64_t mask = 0; mask < subsets; ++mask) {
          auto e = make(1.0 / static_cast<double>(n));
          for (std::size_t k = 0; k < recv.size(); ++k) {
            const double p = w(recv[k], j);
            if (mask >> k & 1u) {
              e.probability *= p;
              e.coeffs.push_back({recv[k], j, q});
            } else {
              e.probability *= 1.0 - p;
            }
          }
          raw.push_back(std::move(e));
        }
      }
      break;
    case ModelKind::kSAGA: {
      std::vector<std::vector<Eigen::Index>> nbrs(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          if (w(i, j) > 0.0) nbrs[static_cast<std::size_t>(i)].push_back(j);
      std::vector<std::size_t> digit(static_cast<std::size_t>(n), 0);
      for (;;) {
        auto e = make(1.0);
        for (Eigen::Index i = 0; i < n; ++i) {
          const Eigen::Index j = nbrs[static_cast<std::size_t>(i)][digit[static_cast<std::size_t>(i)]];
          e.probability *= w(i, j);
          if (j != i) e.coeffs.push_back({i, j, q});
        }
        raw.push_back(std::move(e));
        std::size_t pos = 0;
        while (pos < digit.size() && ++digit[pos] == nbrs[pos].size()) digit[pos++] = 0;
        if (pos == digit.size()) break;
      }
      break;
    }
  }
  return merge_events(std::move(raw));
}

MomentSet make_moments(Matrix el, Matrix ell, Matrix el11l, MomentSource source) {
  MomentSet m;
  m.edrift = el + el.transpose() - ell;
  m.el = std::move(el);
  m.ell = std::move(ell);
  m.el11l = std::move(el11l);
  m.source = source;
  return m;
}

MomentSet moments_from_events(const std::vector<LaplacianEvent>& events) {
  if (events.empty()) throw StructuralError("moments_from_events: empty event list");
  const Eigen::Index n = events.front().n;
  Matrix el = Matrix::Zero(n, n), ell = Matrix::Zero(n, n), el11l = Matrix::Zero(n, n);
  for (const auto& e : events) {
    const Matrix l = e.dense();
    const Vector v = l.colwise().sum().transpose();
    el += e.probability * l;
    ell.noalias() += e.probability * l.transpose() * l;
    el11l.noalias() += e.probability * v * v.transpose();
  }
  return make_moments(std::move(el), std::move(ell), std::move(el11l), MomentSource::kEnumeration);
}

Matrix expected_laplacian(const UpdateModel& model) {
  const Matrix lw = laplacian(model.weights());
  const double q = model.q();
  const double n = static_cast<double>(model.n());
  switch (model.kind()) {
    case ModelKind::kAAGA:
    case ModelKind::kSAGA: return q * lw;
    case ModelKind::kBGA:
    case ModelKind::kPBGA: return (q / n) * lw;
  }
  return lw;
}

std::optional<MomentSet> closed_form_moments(const UpdateModel& model) {
  const Matrix& w = model.weights();
  const Matrix lw = laplacian(w);
  const Matrix lsym = laplacian(w + w.transpose());
  const double q = model.q();
  const double n = static_cast<double>(model.n());
  const GraphStats s = stats(model.graph());

  switch (model.kind()) {
    case ModelKind::kAAGA:
      // Each event is q e_i (e_i - e_j)^T, so L^T L and L^T 1 1^T L coincide.
      return make_moments(q * lw, q * q * lsym, q * q * lsym, MomentSource::kClosedForm);
    case ModelKind::kBGA: {
      if (!s.is_balanced) return std::nullopt;
      const Matrix lt = laplacian(Matrix(w.transpose()));
      return make_moments((q / n) * lw, (q * q / n) * lsym,
                          (q * q / n) * (lt.transpose() * lt), MomentSource::kClosedForm);
    }
    case ModelKind::kPBGA: {
      if (!s.is_symmetric) return std::nullopt;
      const Matrix lww = laplacian(Matrix(w.cwiseProduct(w)));
      const double c = q * q / n;
      return make_moments((q / n) * lw, 2.0 * c * lw, c * (lw * lw) + 2.0 * c * lw - 2.0 * c * lww,
                          MomentSource::kClosedForm);
    }
    case ModelKind::kSAGA: {
      // Rows are independent: E[vv^T] = sum_i Cov(r_i) + (sum_i E r_i)(sum_i E r_i)^T.
      const Matrix ell = q * q * lsym;
      const Vector mean_sum = q * lw.colwise().sum().transpose();
      const Matrix el11l = ell - q * q * (lw.transpose() * lw) + mean_sum * mean_sum.transpose();
      return make_moments(q * lw, ell, el11l, MomentSource::kClosedForm);
    }
  }
  return std::nullopt;
}

MomentSet exact_moments(const UpdateModel& model, double budget) {
  if (auto m = closed_form_moments(model)) return *std::move(m);
  return moments_from_events(enumerate_events(model, budget));
}

EmpiricalMoments empirical_moments_detailed(const UpdateModel& model, std::size_t trials,
                                            std::uint64_t seed) {
  if (trials < 1) throw StructuralError("empirical_moments: need at least one trial");
  const Eigen::Index n = model.n();
  Matrix s1[3], s2[3];
  for (int k = 0; k < 3; ++k) {
    s1[k] = Matrix::Zero(n, n);
    s2[k] = Matrix::Zero(n, n);
  }
  LaplacianEvent e;
  for (std::size_t t = 0; t < trials; ++t) {
    CounterRng rng(seed, t, 0);
    model.sample_into(rng, e);
    const Matrix l = e.dense();
    const Vector v = l.colwise().sum().transpose();
    const Matrix draws[3] = {l, l.transpose() * l, v * v.transpose()};
    for (int k = 0; k < 3; ++k) {
      s1[k] += draws[k];
      s2[k] += draws[k].cwiseProduct(draws[k]);
    }
  }
  const double tn = static_cast<double>(trials);
  Matrix mean[3], se[3];
  for (int k = 0; k < 3; ++k) {
    mean[k] = s1[k] / tn;
    if (trials >= 2) {
      const Matrix var = ((s2[k] / tn - mean[k].cwiseProduct(mean[k])) * (tn / (tn - 1.0)))
                             .cwiseMax(0.0);
      se[k] = (var / tn).cwiseSqrt();
    } else {
      se[k] = Matrix::Zero(n, n);
    }
  }
  EmpiricalMoments out;
  out.moments = make_moments(mean[0], mean[1], mean[2], MomentSource::kEmpirical);
  out.moments.trials = trials;
  out.se_el = se[0];
  out.se_ell = se[1];
  out.se_el11l = se[2];
  return out;
}

MomentSet empirical_moments(const UpdateModel& model, std::size_t trials, std::uint64_t seed) {
  return empirical_moments_detailed(model, trials, seed).moments;
}

StructureBounds structure_bounds(const UpdateModel& model) {
  const double q = model.q();
  const double n = static_cast<double>(model.n());
  const GraphStats s = stats(model.graph());
  const double col = q * static_cast<double>(s.d_max_in);
  StructureBounds b;
  b.alpha_min = 1.0 - q;
  b.a_ind_max = q;
  switch (model.kind()) {
    case ModelKind::kAAGA:
      b.a_max = b.a_row_max = b.a_col_max = q;
      break;
    case ModelKind::kBGA:
    case ModelKind::kPBGA:
      // One broadcaster j reaches at most the support of column j.
      b.a_max = col;
      b.a_row_max = q;
      b.a_col_max = col;
      break;
    case ModelKind::kSAGA:
      b.a_max = q * n;
      b.a_row_max = q;
      b.a_col_max = col;
      break;
  }
  return b;
}

CorrelationCase parse_correlation_case(std::string_view name) {
  if (name == "a") return CorrelationCase::kA;
  if (name == "b") return CorrelationCase::kB;
  if (name == "c") return CorrelationCase::kC;
  throw StructuralError("unknown correlation case '" + std::string(name) + "'");
}

namespace {

bool pair_required(CorrelationCase which, Eigen::Index i, Eigen::Index j, Eigen::Index k,
                   Eigen::Index l) {
  switch (which) {
    case CorrelationCase::kA: return i != k || j != l;
    case CorrelationCase::kB: return i != k;
    case CorrelationCase::kC: return j != l;
  }
  return false;
}

// SAGA rows are drawn independently, so the law of any coefficient pair only
// needs the marginal law of the one or two rows involved.
CovarianceVerdict saga_row_covariance(const UpdateModel& model, CorrelationCase which) {
  const Matrix& w = model.weights();
  const double q = model.q();
  const Eigen::Index n = model.n();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = 0; l < n; ++l) {
          if (k == l || !pair_required(which, i, j, k, l)) continue;
          // Within a row exactly one neighbor is chosen; across rows the
          // joint law is the product of the row marginals.
          double joint;
          if (i == k) {
            joint = (j == l) ? q * q * w(i, j) : 0.0;
          } else {
            joint = (q * w(i, j)) * (q * w(k, l));
          }
          worst = std::max(worst, std::abs(joint - q * w(i, j) * q * w(k, l)));
        }
    }
  return {worst <= 1e-12, worst};
}

}  // namespace

CovarianceVerdict covariance_structure(const UpdateModel& model, CorrelationCase which,
                                       double budget) {
  if (model.kind() == ModelKind::kSAGA && model.support_size() > budget) {
    return saga_row_covariance(model, which);
  }
  const auto events = enumerate_events(model, budget);
  const Eigen::Index n = model.n();
  const Eigen::Index m = n * n;
  Vector mean = Vector::Zero(m);
  Matrix second = Matrix::Zero(m, m);
  for (const auto& e : events) {
    Vector a = Vector::Zero(m);
    for (const auto& c : e.coeffs) a(c.row * n + c.col) += c.value;
    mean += e.probability * a;
    second.noalias() += e.probability * a * a.transpose();
  }
  const Matrix cov = second - mean * mean.transpose();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = 0; l < n; ++l) {
          if (k == l || !pair_required(which, i, j, k, l)) continue;
          worst = std::max(worst, std::abs(cov(i * n + j, k * n + l)));
        }
    }
  return {worst <= 1e-12, worst};
}

bool check_mean_preserving(const Matrix& el, double tol) {
  return el.colwise().sum().cwiseAbs().maxCoeff() <= tol;
}

bool check_mean_preserving(const MomentSet& moments, double tol) {
  return check_mean_preserving(moments.el, tol);
}

}  // namespace gossip
