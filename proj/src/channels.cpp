#include "qmi/channels.hpp"
#include <algorithm>

#include <cmath>
#include <numbers>
#include <numeric>

namespace qmi {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

void require_probability(double x, const char* name) {
  require(x >= 0.0 && x <= 1.0, std::string(name) + " must lie in [0, 1]");
}

}  // namespace

KrausChannel::KrausChannel(int in_dim, int out_dim, std::vector<ComplexMatrix> ops)
    : in_dim_(in_dim), out_dim_(out_dim), ops_(std::move(ops)) {
  if (in_dim_ < 1 || out_dim_ < 1 || ops_.empty()) throw DimensionError("KrausChannel: empty channel");
  for (const auto& k : ops_) {
    if (k.rows() != out_dim_ || k.cols() != in_dim_) {
      throw DimensionError("KrausChannel: Kraus operator is " + std::to_string(k.rows()) + "x" +
                           std::to_string(k.cols()) + ", expected " + std::to_string(out_dim_) + "x" +
                           std::to_string(in_dim_));
    }
  }
  const double defect = trace_preservation_defect();
  if (defect > tol::kTracePreserving) {
    throw InvalidArgument("KrausChannel: not trace preserving (defect " + std::to_string(defect) + ")");
  }
}

double KrausChannel::trace_preservation_defect() const {
  ComplexMatrix s = ComplexMatrix::Zero(in_dim_, in_dim_);
  for (const auto& k : ops_) s += k.adjoint() * k;
  return (s - ComplexMatrix::Identity(in_dim_, in_dim_)).cwiseAbs().maxCoeff();
}

ComplexMatrix KrausChannel::apply_matrix(const ComplexMatrix& x) const {
  if (x.rows() != in_dim_ || x.cols() != in_dim_) throw DimensionError("KrausChannel: input dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(out_dim_, out_dim_);
  for (const auto& k : ops_) out.noalias() += k * x * k.adjoint();
  return out;
}

DensityOperator KrausChannel::apply(const DensityOperator& rho) const {
  ComplexMatrix out = hermitian_part(apply_matrix(rho.matrix()));
  const double tr = out.trace().real();
  // The channel is trace preserving to 1e-9; absorb that slack so the output validates at 1e-10.
  if (std::abs(tr - 1.0) <= 1e-8) out /= tr;
  return DensityOperator(std::move(out));
}

KrausChannel compose(const KrausChannel& second, const KrausChannel& first) {
  if (second.in_dim() != first.out_dim()) throw DimensionError("compose: inner output != outer input");
  std::vector<ComplexMatrix> ops;
  ops.reserve(second.ops().size() * first.ops().size());
  for (const auto& b : second.ops())
    for (const auto& a : first.ops()) ops.emplace_back(b * a);
  return KrausChannel(first.in_dim(), second.out_dim(), std::move(ops));
}

StinespringIsometry::StinespringIsometry(ComplexMatrix isometry, int d_noise, int d_out)
    : v_(std::move(isometry)), d_noise_(d_noise), d_out_(d_out) {
  if (d_noise_ < 1 || d_out_ < 1 || v_.rows() != static_cast<Eigen::Index>(d_noise_) * d_out_ || v_.cols() < 1) {
    throw DimensionError("StinespringIsometry: rows must equal d_noise * d_out");
  }
  const Eigen::Index d_in = v_.cols();
  const double defect = (v_.adjoint() * v_ - ComplexMatrix::Identity(d_in, d_in)).cwiseAbs().maxCoeff();
  if (defect > tol::kIsometry) {
    throw InvalidArgument("StinespringIsometry: not an isometry (defect " + std::to_string(defect) + ")");
  }
}

DensityOperator stinespring_apply(const StinespringIsometry& st, const DensityOperator& rho) {
  if (rho.dim() != st.d_in()) throw DimensionError("stinespring_apply: input dimension mismatch");
  const ComplexMatrix joint = st.isometry() * rho.matrix() * st.isometry().adjoint();
  ComplexMatrix out = hermitian_part(partial_trace(joint, st.d_noise(), st.d_out(), Keep::Second));
  out /= out.trace().real();
  return DensityOperator(std::move(out));
}

KrausChannel stinespring_to_kraus(const StinespringIsometry& st) {
  std::vector<ComplexMatrix> ops;
  for (int i = 0; i < st.d_noise(); ++i) ops.emplace_back(st.isometry().middleRows(i * st.d_out(), st.d_out()));
  return KrausChannel(st.d_in(), st.d_out(), std::move(ops));
}

StinespringIsometry kraus_to_stinespring(const KrausChannel& ch) {
  const int n = static_cast<int>(ch.ops().size());
  ComplexMatrix v(static_cast<Eigen::Index>(n) * ch.out_dim(), ch.in_dim());
  for (int i = 0; i < n; ++i) v.middleRows(i * ch.out_dim(), ch.out_dim()) = ch.ops()[i];
  return StinespringIsometry(std::move(v), n, ch.out_dim());
}

Povm::Povm(std::vector<ComplexMatrix> effects) : effects_(std::move(effects)) {
  if (effects_.empty()) throw InvalidArgument("Povm: no effects");
  const Eigen::Index d = effects_.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (auto& m : effects_) {
    if (m.rows() != d || m.cols() != d) throw DimensionError("Povm: effects differ in dimension");
    if (max_hermitian_defect(m) > tol::kHermitian) throw InvalidArgument("Povm: effect is not Hermitian");
    m = hermitian_part(m);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -tol::kPsd) throw InvalidArgument("Povm: effect is not positive semidefinite");
    sum += m;
  }
  if ((sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol::kPovmSum) {
    throw InvalidArgument("Povm: effects do not sum to the identity");
  }
}

Povm Povm::projective(const ComplexMatrix& basis) {
  std::vector<ComplexMatrix> effects;
  for (Eigen::Index j = 0; j < basis.cols(); ++j) effects.emplace_back(basis.col(j) * basis.col(j).adjoint());
  return Povm(std::move(effects));
}

Povm Povm::computational(int dim) { return projective(ComplexMatrix::Identity(dim, dim)); }

std::vector<double> Povm::probabilities(const ComplexMatrix& sigma) const {
  std::vector<double> p;
  p.reserve(effects_.size());
  for (const auto& m : effects_) p.push_back(std::max(0.0, (sigma * m).trace().real()));
  return p;
}

ComplexMatrix choi_matrix(const KrausChannel& ch) {
  const int n = ch.in_dim();
  const int m = ch.out_dim();
  ComplexMatrix choi = ComplexMatrix::Zero(static_cast<Eigen::Index>(n) * m, static_cast<Eigen::Index>(n) * m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      ComplexMatrix eij = ComplexMatrix::Zero(n, n);
      eij(i, j) = 1.0;
      choi.block(i * m, j * m, m, m) = ch.apply_matrix(eij);
    }
  }
  return choi;
}

KrausChannel identity_channel(int dim) {
  return KrausChannel(dim, dim, {ComplexMatrix::Identity(dim, dim)});
}

KrausChannel depolarizing_channel(int dim, double p) {
  require_probability(p, "depolarizing p");
  require(dim >= 1, "depolarizing: dim must be >= 1");
  // Heisenberg-Weyl operators X^a Z^b form a unitary error basis; their uniform twirl is I/d.
  const double d2 = static_cast<double>(dim) * dim;
  const Complex omega = std::exp(Complex(0.0, 2.0 * std::numbers::pi / dim));
  std::vector<ComplexMatrix> ops;
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      const double w = (a == 0 && b == 0) ? 1.0 - p + p / d2 : p / d2;
      if (w == 0.0) continue;
      ComplexMatrix k = ComplexMatrix::Zero(dim, dim);
      for (int j = 0; j < dim; ++j) k((j + a) % dim, j) = std::pow(omega, static_cast<double>(b * j));
      ops.emplace_back(std::sqrt(w) * k);
    }
  }
  return KrausChannel(dim, dim, std::move(ops));
}

KrausChannel amplitude_damping_channel(double gamma) {
  require_probability(gamma, "amplitude damping gamma");
  ComplexMatrix k0 = ComplexMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  k1(0, 1) = std::sqrt(gamma);
  return KrausChannel(2, 2, {k0, k1});
}

KrausChannel phase_damping_channel(int dim, double lambda) {
  require_probability(lambda, "phase damping lambda");
  std::vector<ComplexMatrix> ops{std::sqrt(1.0 - lambda) * ComplexMatrix::Identity(dim, dim)};
  for (int i = 0; i < dim; ++i) {
    ComplexMatrix k = ComplexMatrix::Zero(dim, dim);
    k(i, i) = std::sqrt(lambda);
    ops.push_back(std::move(k));
  }
  return KrausChannel(dim, dim, std::move(ops));
}

KrausChannel unitary_channel(const ComplexMatrix& u) {
  const Eigen::Index d = u.rows();
  require(u.cols() == d && (u.adjoint() * u - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-9,
          "unitary channel: matrix is not unitary");
  return KrausChannel(static_cast<int>(d), static_cast<int>(d), {u});
}

KrausChannel cq_channel(const std::vector<DensityOperator>& states) {
  require(!states.empty(), "cq channel: no states");
  const int n = static_cast<int>(states.size());
  const int d = states.front().dim();
  std::vector<ComplexMatrix> ops;
  for (int k = 0; k < n; ++k) {
    if (states[k].dim() != d) throw DimensionError("cq channel: coded states differ in dimension");
    const EigenPairs eig = eigh_descending(states[k].matrix());
    for (int i = 0; i < d; ++i) {
      if (eig.values(i) <= 0.0) continue;
      ComplexMatrix op = ComplexMatrix::Zero(d, n);
      op.col(k) = std::sqrt(eig.values(i)) * eig.vectors.col(i);
      ops.push_back(std::move(op));
    }
  }
  return KrausChannel(n, d, std::move(ops));
}

KrausChannel measurement_channel(const Povm& povm) {
  const int d = povm.dim();
  const int n = povm.outcomes();
  std::vector<ComplexMatrix> ops;
  for (int j = 0; j < n; ++j) {
    const ComplexMatrix root = matrix_sqrt_psd(povm.effects()[j]);
    for (int i = 0; i < d; ++i) {
      if (root.row(i).norm() == 0.0) continue;
      ComplexMatrix op = ComplexMatrix::Zero(n, d);
      op.row(j) = root.row(i);
      ops.push_back(std::move(op));
    }
  }
  return KrausChannel(d, n, std::move(ops));
}

KrausChannel classical_channel(const std::vector<std::vector<double>>& transition) {
  require(!transition.empty(), "classical channel: empty transition matrix");
  const int n_in = static_cast<int>(transition.size());
  const int n_out = static_cast<int>(transition.front().size());
  std::vector<ComplexMatrix> ops;
  for (int k = 0; k < n_in; ++k) {
    if (static_cast<int>(transition[k].size()) != n_out) throw DimensionError("classical channel: ragged rows");
    double row = 0.0;
    for (double x : transition[k]) {
      require(x >= 0.0, "classical channel: negative transition probability");
      row += x;
    }
    require(std::abs(row - 1.0) <= 1e-12, "classical channel: row " + std::to_string(k) + " does not sum to 1");
    for (int j = 0; j < n_out; ++j) {
      if (transition[k][j] == 0.0) continue;
      ComplexMatrix op = ComplexMatrix::Zero(n_out, n_in);
      op(j, k) = std::sqrt(transition[k][j]);
      ops.push_back(std::move(op));
    }
  }
  return KrausChannel(n_in, n_out, std::move(ops));
}

KrausChannel constant_channel(int in_dim, const DensityOperator& state) {
  const int d = state.dim();
  const EigenPairs eig = eigh_descending(state.matrix());
  std::vector<ComplexMatrix> ops;
  for (int j = 0; j < d; ++j) {
    if (eig.values(j) <= 0.0) continue;
    for (int i = 0; i < in_dim; ++i) {
      ComplexMatrix op = ComplexMatrix::Zero(d, in_dim);
      op.col(i) = std::sqrt(eig.values(j)) * eig.vectors.col(j);
      ops.push_back(std::move(op));
    }
  }
  return KrausChannel(in_dim, d, std::move(ops));
}

KrausChannel make_channel(const ChannelSpec& spec) {
  return std::visit(
      [](const auto& s) -> KrausChannel {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, channel_kind::Identity>) return identity_channel(s.dim);
        else if constexpr (std::is_same_v<T, channel_kind::Depolarizing>) return depolarizing_channel(s.dim, s.p);
        else if constexpr (std::is_same_v<T, channel_kind::AmplitudeDamping>) return amplitude_damping_channel(s.gamma);
        else if constexpr (std::is_same_v<T, channel_kind::PhaseDamping>) return phase_damping_channel(s.dim, s.lambda);
        else if constexpr (std::is_same_v<T, channel_kind::Unitary>) return unitary_channel(s.u);
        else if constexpr (std::is_same_v<T, channel_kind::ClassicalQuantum>) return cq_channel(s.states);
        else if constexpr (std::is_same_v<T, channel_kind::Measure>) return measurement_channel(s.povm);
        else if constexpr (std::is_same_v<T, channel_kind::Classical>) return classical_channel(s.transition);
        else return constant_channel(s.in_dim, s.state);
      },
      spec);
}

DensityOperator to_diagonal_state(const ProbabilityVector& p) { return DensityOperator::diagonal(p.probs()); }

ProbabilityVector diagonal_distribution(const DensityOperator& rho) {
  std::vector<double> p(rho.dim());
  for (int i = 0; i < rho.dim(); ++i) p[i] = std::max(0.0, rho.matrix()(i, i).real());
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= total;
  return ProbabilityVector(std::move(p));
}

bool is_classical(const KrausChannel& ch, double tol) {
  for (int k = 0; k < ch.in_dim(); ++k) {
    ComplexMatrix e = ComplexMatrix::Zero(ch.in_dim(), ch.in_dim());
    e(k, k) = 1.0;
    ComplexMatrix out = ch.apply_matrix(e);
    out.diagonal().setZero();
    if (out.cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

}  // namespace qmi

namespace qmi {

KrausChannel random_channel(int in_dim, int out_dim, int n_kraus, Rng& rng) {
  // An isometry needs at least in_dim rows.
  n_kraus = std::max(n_kraus, (in_dim + out_dim - 1) / out_dim);
  const ComplexMatrix v = polar_isometry(random_ginibre(n_kraus * out_dim, in_dim, rng));
  std::vector<ComplexMatrix> ops;
  for (int i = 0; i < n_kraus; ++i) ops.emplace_back(v.middleRows(i * out_dim, out_dim));
  return KrausChannel(in_dim, out_dim, std::move(ops));
}

Povm random_povm(int dim, int outcomes, Rng& rng) {
  std::vector<ComplexMatrix> g;
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < outcomes; ++k) {
    const ComplexMatrix a = random_ginibre(dim, dim, rng);
    g.push_back(a * a.adjoint());
    sum += g.back();
  }
  const ComplexMatrix w = matrix_inv_sqrt_on_support(sum);
  for (auto& m : g) m = hermitian_part(w * m * w);
  return Povm(std::move(g));
}

}  // namespace qmi
