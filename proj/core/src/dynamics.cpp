#include "vdbtherm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "vdbtherm/errors.hpp"

namespace vdbtherm {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

double l1_norm(const MatrixXd& m) {
  return m.rows() == 0 ? 0.0 : m.cwiseAbs().colwise().sum().maxCoeff();
}

template <class Mat>
Mat taylor_expm(const Mat& A) {
  using Scalar = typename Mat::Scalar;
  const Eigen::Index n = A.rows();
  const double norm = A.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Mat X = A / static_cast<Scalar>(std::ldexp(1.0, s));
  Mat result = Mat::Identity(n, n);
  Mat term = Mat::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = (term * X) / static_cast<Scalar>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-18 * result.cwiseAbs().maxCoeff()) break;
  }
  for (int i = 0; i < s; ++i) result = result * result;
  return result;
}

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Minimum-norm least-squares solve of A x = b, treating singular values below thr as zero.
VectorXcd lstsq(const Eigen::JacobiSVD<MatrixXcd>& svd, const VectorXcd& b, double thr) {
  const auto& sv = svd.singularValues();
  VectorXcd y = svd.matrixU().adjoint() * b;
  for (Eigen::Index i = 0; i < sv.size(); ++i) y(i) = sv(i) > thr ? y(i) / sv(i) : cdouble{0.0};
  return svd.matrixV() * y;
}

}  // namespace

bool SpectralBlock::is_stationary(double scale) const {
  return std::abs(eigenvalue) <= 1e-10 * scale;
}

PropagatorDecomposition decompose(const RateMatrix& Mr, double lep_tol) {
  const MatrixXd& M = Mr.m;
  const Eigen::Index n = M.rows();
  if (n == 0 || M.cols() != n) throw DimensionError("decompose: generator must be square");

  PropagatorDecomposition d;
  d.M = M;
  d.norm = l1_norm(M);
  d.Q = MatrixXcd::Zero(n, n);

  if (d.norm == 0.0) {
    SpectralBlock b;
    b.eigenvalue = 0.0;
    b.members.assign(n, cdouble{0.0});
    b.dim = b.geometric = static_cast<int>(n);
    d.blocks.push_back(b);
    d.Q.setIdentity();
    d.Qinv = d.Q;
    d.B = MatrixXcd::Zero(n, n);
    return d;
  }

  Eigen::EigenSolver<MatrixXd> es(M);
  if (es.info() != Eigen::Success) throw ConditioningError("decompose: eigensolver failed", 0.0);
  const VectorXcd ev = es.eigenvalues();
  const MatrixXcd evec = es.eigenvectors();
  const double thr = lep_tol * d.norm;

  DisjointSet ds(static_cast<int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(ev(i) - ev(j)) <= thr) ds.unite(i, j);

  std::vector<std::vector<int>> groups;
  {
    std::vector<int> root_to_group(n, -1);
    for (int i = 0; i < n; ++i) {
      const int r = ds.find(i);
      if (root_to_group[r] < 0) {
        root_to_group[r] = static_cast<int>(groups.size());
        groups.emplace_back();
      }
      groups[root_to_group[r]].push_back(i);
    }
  }
  auto mean_of = [&](const std::vector<int>& g) {
    cdouble s = 0.0;
    for (int i : g) s += ev(i);
    return s / static_cast<double>(g.size());
  };
  std::sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) {
    const cdouble ma = mean_of(a), mb = mean_of(b);
    if (ma.real() != mb.real()) return ma.real() > mb.real();
    return ma.imag() > mb.imag();
  });

  int offset = 0;
  for (const auto& g : groups) {
    SpectralBlock b;
    b.eigenvalue = mean_of(g);
    for (int i : g) b.members.push_back(ev(i));
    b.dim = static_cast<int>(g.size());
    b.offset = offset;

    if (b.dim == 1) {
      VectorXcd v = evec.col(g[0]);
      d.Q.col(offset) = v / v.norm();
      b.eigenvalue = ev(g[0]);
      b.geometric = 1;
    } else {
      const MatrixXcd A = M.cast<cdouble>() - b.eigenvalue * MatrixXcd::Identity(n, n);
      MatrixXcd P = A;
      for (int k = 1; k < b.dim; ++k) P = P * A;
      Eigen::JacobiSVD<MatrixXcd> svd_p(P, Eigen::ComputeFullV);
      const MatrixXcd W = svd_p.matrixV().rightCols(b.dim);
      const MatrixXcd R = W.adjoint() * M.cast<cdouble>() * W;
      const MatrixXcd Rn = R - b.eigenvalue * MatrixXcd::Identity(b.dim, b.dim);
      Eigen::JacobiSVD<MatrixXcd> svd_r(Rn, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const auto& sv = svd_r.singularValues();
      b.geometric = 0;
      for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= thr) ++b.geometric;
      b.geometric = std::max(b.geometric, 1);

      MatrixXcd basis = W;
      if (b.geometric == 1) {
        MatrixXcd chain(b.dim, b.dim);
        chain.col(0) = svd_r.matrixV().col(b.dim - 1);
        for (int j = 1; j < b.dim; ++j) {
          VectorXcd next = lstsq(svd_r, chain.col(j - 1), thr);
          // Keep the chain independent of the eigenvector it grows from.
          for (int i = 0; i < j; ++i) next -= chain.col(i) * (chain.col(i).dot(next));
          const double nn = next.norm();
          if (!(nn > 0.0)) throw ConditioningError("decompose: Jordan chain collapsed", 0.0);
          chain.col(j) = next / nn;
        }
        basis = W * chain;
        b.jordan = true;
      }
      d.Q.middleCols(offset, b.dim) = basis;
    }
    offset += b.dim;
    d.blocks.push_back(std::move(b));
  }

  Eigen::JacobiSVD<MatrixXcd> svd_q(d.Q);
  const auto& sq = svd_q.singularValues();
  d.condition = sq(sq.size() - 1) > 0.0 ? sq(0) / sq(sq.size() - 1)
                                        : std::numeric_limits<double>::infinity();
  if (!(d.condition <= kMaxCondition)) {
    std::ostringstream os;
    os << "decompose: eigenbasis condition number " << d.condition << " exceeds "
       << kMaxCondition << "; use exp_oracle";
    throw ConditioningError(os.str(), d.condition);
  }
  d.Qinv = d.Q.partialPivLu().inverse();
  const MatrixXcd full = d.Qinv * M.cast<cdouble>() * d.Q;
  d.B = MatrixXcd::Zero(n, n);
  for (const auto& b : d.blocks)
    d.B.block(b.offset, b.offset, b.dim, b.dim) = full.block(b.offset, b.offset, b.dim, b.dim);
  return d;
}

namespace {

MatrixXcd block_exp(const PropagatorDecomposition& d, const SpectralBlock& b, double t) {
  const MatrixXcd Bk = d.B.block(b.offset, b.offset, b.dim, b.dim);
  if (b.dim == 1) return MatrixXcd::Constant(1, 1, std::exp(Bk(0, 0) * t));
  const MatrixXcd N = Bk - b.eigenvalue * MatrixXcd::Identity(b.dim, b.dim);
  return std::exp(b.eigenvalue * t) * taylor_expm<MatrixXcd>(N * cdouble{t});
}

}  // namespace

MatrixXd PropagatorDecomposition::exp(double t) const {
  const Eigen::Index n = size();
  MatrixXcd out = MatrixXcd::Zero(n, n);
  for (const auto& b : blocks) {
    out += Q.middleCols(b.offset, b.dim) * block_exp(*this, b, t) *
           Qinv.middleRows(b.offset, b.dim);
  }
  return out.real();
}

double PropagatorDecomposition::reconstruction_error() const {
  const MatrixXd R = (Q * B * Qinv).real();
  return (R - M).cwiseAbs().maxCoeff() / std::max(norm, std::numeric_limits<double>::min());
}

std::vector<cdouble> PropagatorDecomposition::eigenvalues() const {
  std::vector<cdouble> out;
  for (const auto& b : blocks) out.insert(out.end(), b.members.begin(), b.members.end());
  return out;
}

MatrixXd exp_oracle(const MatrixXd& M, double t) {
  if (!(t >= 0.0)) throw InputError("exp_oracle: t must be nonnegative");
  return taylor_expm<MatrixXd>(M * t);
}

void check_simplex(const VectorXd& p, double tol) {
  if (p.size() == 0) throw InputError("initial state is empty");
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p(i) >= -tol && p(i) <= 1.0 + tol)) {
      std::ostringstream os;
      os << "initial state component " << i << " = " << p(i) << " outside [0, 1]";
      throw InputError(os.str());
    }
  }
  if (!(std::abs(p.sum() - 1.0) <= tol)) {
    std::ostringstream os;
    os << "initial state sums to " << p.sum() << ", not 1";
    throw InputError(os.str());
  }
}

Trajectory propagate(const PropagatorDecomposition& d, const VectorXd& P0,
                     const std::vector<double>& times) {
  if (P0.size() != d.size()) throw DimensionError("propagate: initial state has wrong size");
  check_simplex(P0);
  Trajectory tr;
  tr.times = times;
  tr.initial = P0;
  const VectorXcd c = d.Qinv * P0.cast<cdouble>();
  const Eigen::Index n = d.size();
  VectorXcd stat = VectorXcd::Zero(n);
  for (const auto& b : d.blocks)
    if (b.is_stationary(d.norm))
      stat += d.Q.middleCols(b.offset, b.dim) * c.segment(b.offset, b.dim);
  tr.stationary = stat.real();
  tr.populations.reserve(times.size());
  tr.deviations.reserve(times.size());
  for (double t : times) {
    if (!(t >= 0.0)) throw InputError("propagate: times must be nonnegative");
    VectorXcd dev = VectorXcd::Zero(n);
    for (const auto& b : d.blocks) {
      if (b.is_stationary(d.norm)) continue;
      dev += d.Q.middleCols(b.offset, b.dim) * (block_exp(d, b, t) * c.segment(b.offset, b.dim));
    }
    tr.deviations.push_back(dev.real());
    tr.populations.push_back(tr.stationary + dev.real());
  }
  return tr;
}

Trajectory propagate(const RateMatrix& M, const VectorXd& P0, const std::vector<double>& times,
                     double lep_tol) {
  try {
    return propagate(decompose(M, lep_tol), P0, times);
  } catch (const ConditioningError&) {
    if (P0.size() != M.size()) throw DimensionError("propagate: initial state has wrong size");
    check_simplex(P0);
    Trajectory tr;
    tr.times = times;
    tr.initial = P0;
    tr.path = "oracle";
    // Stationary state: far-time limit of the oracle.
    const double ts = slowest_time(M);
    tr.stationary = exp_oracle(M.m, std::isfinite(ts) ? 80.0 * ts : 0.0) * P0;
    for (double t : times) {
      const VectorXd p = exp_oracle(M.m, t) * P0;
      tr.populations.push_back(p);
      tr.deviations.push_back(p - tr.stationary);
    }
    return tr;
  }
}

double slowest_time(const RateMatrix& M) {
  Eigen::EigenSolver<MatrixXd> es(M.m, false);
  const double scale = l1_norm(M.m);
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const cdouble l = es.eigenvalues()(i);
    if (std::abs(l) <= 1e-10 * scale) continue;
    best = std::max(best, l.real());
  }
  if (!std::isfinite(best) || best >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / best;
}

Observables observables(const Trajectory& traj, const VectorXd& P_th, const RateMatrix& M,
                        int level) {
  if (traj.times.empty()) throw InputError("observables: empty trajectory");
  if (level < 0 || level >= P_th.size()) throw DimensionError("observables: level out of range");
  Observables o;
  o.t_slow = slowest_time(M);
  const double d0 = traj.initial(level) - P_th(level);
  if (!(std::abs(d0) > 1e-12))
    throw NormalizationError("observables: initial distance to the thermal state vanishes");
  const double offset = traj.stationary(level) - P_th(level);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double dp = traj.deviations[i](level) + offset;
    o.delta_p.push_back(dp);
    const double g = std::isfinite(o.t_slow) ? std::exp(traj.times[i] / o.t_slow) : 1.0;
    o.delta_p_rescaled.push_back(dp * g / d0);
  }
  return o;
}

int zero_crossings(const std::vector<double>& series) {
  int count = 0;
  int last = 0;
  for (double x : series) {
    const int s = (x > 0.0) - (x < 0.0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

}  // namespace vdbtherm
