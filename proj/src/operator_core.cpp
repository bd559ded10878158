#include "qmi/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qmi {

namespace {

std::string dims_str(const ComplexMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " + dims_str(m));
  }
}

struct Block {
  double value;
  int begin;
  int size;
};

// Groups descending eigenvalues into blocks whose spread stays within the tolerance.
std::vector<Block> group_eigenvalues(const RealVector& values, double degeneracy_tol) {
  std::vector<Block> blocks;
  const int n = static_cast<int>(values.size());
  const double scale = std::max(1.0, std::abs(values(0)));
  int i = 0;
  while (i < n) {
    int j = i + 1;
    while (j < n && std::abs(values(i) - values(j)) <= degeneracy_tol * scale) ++j;
    double mean = 0.0;
    for (int k = i; k < j; ++k) mean += values(k);
    blocks.push_back({mean / (j - i), i, j - i});
    i = j;
  }
  return blocks;
}

// Deterministic orthonormal basis of ran(P): pivoted Gram-Schmidt on P e_j.
ComplexMatrix canonical_block_basis(const ComplexMatrix& projector, int multiplicity) {
  const int d = static_cast<int>(projector.rows());
  ComplexMatrix basis(d, multiplicity);
  std::vector<ComplexVector> residuals;
  residuals.reserve(d);
  for (int j = 0; j < d; ++j) residuals.emplace_back(projector.col(j));
  for (int b = 0; b < multiplicity; ++b) {
    int best = -1;
    double best_norm = -1.0;
    for (int j = 0; j < d; ++j) {
      const double nrm = residuals[j].norm();
      if (nrm > best_norm + 1e-12) {
        best_norm = nrm;
        best = j;
      }
    }
    ComplexVector v = phase_fixed(residuals[best] / best_norm);
    basis.col(b) = v;
    for (auto& r : residuals) r -= v * v.dot(r);
  }
  return basis;
}

}  // namespace

DensityOperator::DensityOperator(ComplexMatrix m) {
  require_square(m, "DensityOperator");
  const double defect = max_hermitian_defect(m);
  if (defect > tol::kHermitian) {
    throw InvalidArgument("DensityOperator: not Hermitian (defect " + std::to_string(defect) + ")");
  }
  m_ = hermitian_part(m);
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > tol::kTrace) {
    throw InvalidArgument("DensityOperator: trace " + std::to_string(tr) + " differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -tol::kPsd) {
    throw InvalidArgument("DensityOperator: negative eigenvalue " + std::to_string(es.eigenvalues()(0)));
  }
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
  if (dim < 1) throw InvalidArgument("maximally_mixed: dim must be >= 1");
  return DensityOperator(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityOperator DensityOperator::pure(const ComplexVector& psi) {
  const double nrm = psi.norm();
  if (psi.size() < 1 || nrm == 0.0) throw InvalidArgument("pure: zero vector");
  const ComplexVector v = psi / nrm;
  return DensityOperator(v * v.adjoint());
}

DensityOperator DensityOperator::diagonal(std::span<const double> probs) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(probs.size()),
                                        static_cast<Eigen::Index>(probs.size()));
  for (std::size_t i = 0; i < probs.size(); ++i) m(i, i) = probs[i];
  return DensityOperator(std::move(m));
}

ProbabilityVector::ProbabilityVector(std::vector<double> probs) : p_(std::move(probs)) {
  if (p_.empty()) throw InvalidArgument("ProbabilityVector: empty");
  double sum = 0.0;
  for (double x : p_) {
    if (!(x >= 0.0)) throw InvalidArgument("ProbabilityVector: negative or NaN entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > tol::kProbabilitySum) {
    throw InvalidArgument("ProbabilityVector: entries sum to " + std::to_string(sum));
  }
}

ProbabilityVector ProbabilityVector::uniform(int n) {
  if (n < 1) throw InvalidArgument("uniform: n must be >= 1");
  return ProbabilityVector(std::vector<double>(n, 1.0 / n));
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
  ComplexMatrix out = ComplexMatrix::Zero(projectors.front().rows(), projectors.front().cols());
  for (std::size_t k = 0; k < projectors.size(); ++k) out += eigenvalues[k] * projectors[k];
  return out;
}

ComplexMatrix SchattenDecomposition::reconstruct() const {
  const auto d = vectors.front().size();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (std::size_t k = 0; k < vectors.size(); ++k) out += weights[k] * vectors[k] * vectors[k].adjoint();
  return out;
}

ComplexMatrix SchattenDecomposition::basis() const {
  const auto d = vectors.front().size();
  ComplexMatrix b(d, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t k = 0; k < vectors.size(); ++k) b.col(static_cast<Eigen::Index>(k)) = vectors[k];
  return b;
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& theta, int d_first, int d_second, Keep keep) {
  if (d_first < 1 || d_second < 1 || theta.rows() != static_cast<Eigen::Index>(d_first) * d_second ||
      theta.cols() != theta.rows()) {
    throw DimensionError("partial_trace: " + dims_str(theta) + " is not (" + std::to_string(d_first) + "*" +
                         std::to_string(d_second) + ")-square");
  }
  if (keep == Keep::First) {
    ComplexMatrix out = ComplexMatrix::Zero(d_first, d_first);
    for (int i = 0; i < d_first; ++i)
      for (int j = 0; j < d_first; ++j)
        for (int k = 0; k < d_second; ++k) out(i, j) += theta(i * d_second + k, j * d_second + k);
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(d_second, d_second);
  for (int g = 0; g < d_first; ++g) out += theta.block(g * d_second, g * d_second, d_second, d_second);
  return out;
}

double max_hermitian_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

EigenPairs eigh_descending(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h));
  const Eigen::Index n = h.rows();
  EigenPairs out{RealVector(n), ComplexMatrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

SpectralDecomposition spectral(const ComplexMatrix& h, double degeneracy_tol) {
  require_square(h, "spectral");
  if (max_hermitian_defect(h) > tol::kHermitian) throw InvalidArgument("spectral: input is not Hermitian");
  const EigenPairs eig = eigh_descending(h);
  SpectralDecomposition out;
  for (const Block& b : group_eigenvalues(eig.values, degeneracy_tol)) {
    ComplexMatrix basis = eig.vectors.middleCols(b.begin, b.size);
    out.eigenvalues.push_back(b.value);
    out.multiplicities.push_back(b.size);
    out.projectors.push_back(basis * basis.adjoint());
    out.bases.push_back(std::move(basis));
  }
  return out;
}

SchattenDecomposition canonical_schatten(const DensityOperator& rho) {
  const SpectralDecomposition sd = spectral(rho.matrix());
  SchattenDecomposition out;
  for (std::size_t b = 0; b < sd.eigenvalues.size(); ++b) {
    const int m = sd.multiplicities[b];
    const double w = std::max(0.0, sd.eigenvalues[b]);
    if (m == 1) {
      out.weights.push_back(w);
      out.vectors.push_back(phase_fixed(sd.bases[b].col(0)));
      continue;
    }
    const ComplexMatrix basis = canonical_block_basis(sd.projectors[b], m);
    for (int j = 0; j < m; ++j) {
      out.weights.push_back(w);
      out.vectors.emplace_back(basis.col(j));
    }
  }
  // Block means can shift the total by rounding; renormalize so weights form a distribution.
  const double total = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
  for (double& w : out.weights) w /= total;
  return out;
}

namespace {

struct BlockLayout {
  int begin;
  int size;
  bool positive;
};

std::vector<BlockLayout> degenerate_blocks(const DensityOperator& rho) {
  const EigenPairs eig = eigh_descending(rho.matrix());
  std::vector<BlockLayout> out;
  for (const Block& b : group_eigenvalues(eig.values, tol::kDegeneracy)) {
    if (b.size >= 2) out.push_back({b.begin, b.size, b.value > tol::kZero});
  }
  return out;
}

}  // namespace

std::size_t schatten_param_count(const DensityOperator& rho) {
  std::size_t n = 0;
  for (const auto& b : degenerate_blocks(rho)) n += static_cast<std::size_t>(b.size) * b.size;
  return n;
}

std::size_t schatten_active_param_count(const DensityOperator& rho) {
  std::size_t n = 0;
  for (const auto& b : degenerate_blocks(rho))
    if (b.positive) n += static_cast<std::size_t>(b.size) * b.size;
  return n;
}

SchattenDecomposition schatten_family(const DensityOperator& rho, std::span<const double> params) {
  const auto blocks = degenerate_blocks(rho);
  std::size_t expected = 0;
  for (const auto& b : blocks) expected += static_cast<std::size_t>(b.size) * b.size;
  if (params.size() != expected) {
    throw InvalidArgument("schatten_family: expected " + std::to_string(expected) + " parameters, got " +
                          std::to_string(params.size()));
  }
  SchattenDecomposition out = canonical_schatten(rho);
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    const std::size_t count = static_cast<std::size_t>(b.size) * b.size;
    const ComplexMatrix u = unitary_from_params(params.subspan(offset, count), b.size);
    offset += count;
    ComplexMatrix basis(rho.dim(), b.size);
    for (int j = 0; j < b.size; ++j) basis.col(j) = out.vectors[b.begin + j];
    const ComplexMatrix rotated = basis * u;
    for (int j = 0; j < b.size; ++j) out.vectors[b.begin + j] = rotated.col(j);
  }
  return out;
}

ComplexMatrix matrix_log_on_support(const ComplexMatrix& p, double zero_tol) {
  require_square(p, "matrix_log_on_support");
  const EigenPairs eig = eigh_descending(p);
  if (eig.values(eig.values.size() - 1) < -tol::kPsd) {
    throw InvalidArgument("matrix_log_on_support: negative eigenvalue " +
                          std::to_string(eig.values(eig.values.size() - 1)));
  }
  ComplexMatrix out = ComplexMatrix::Zero(p.rows(), p.cols());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > zero_tol) out += std::log(eig.values(i)) * eig.vectors.col(i) * eig.vectors.col(i).adjoint();
  }
  return out;
}

ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& p) {
  const EigenPairs eig = eigh_descending(p);
  const RealVector s = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * s.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix matrix_inv_sqrt_on_support(const ComplexMatrix& p, double zero_tol) {
  const EigenPairs eig = eigh_descending(p);
  RealVector s(eig.values.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = eig.values(i) > zero_tol ? 1.0 / std::sqrt(eig.values(i)) : 0.0;
  return eig.vectors * s.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix matrix_exp_hermitian(const ComplexMatrix& h) {
  const EigenPairs eig = eigh_descending(h);
  ComplexVector phases(eig.values.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::exp(Complex(0.0, eig.values(i)));
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

Purification purify(const DensityOperator& theta, double zero_tol) {
  const EigenPairs eig = eigh_descending(theta.matrix());
  const int d = theta.dim();
  int rank = 0;
  double mass = 0.0;
  for (int i = 0; i < d; ++i) {
    if (eig.values(i) > zero_tol) {
      ++rank;
      mass += eig.values(i);
    }
  }
  Purification out;
  out.ancilla_dim = rank;
  out.psi = ComplexVector::Zero(static_cast<Eigen::Index>(d) * rank);
  for (int j = 0; j < rank; ++j) {
    const ComplexVector v = phase_fixed(eig.vectors.col(j));
    const double amp = std::sqrt(eig.values(j) / mass);
    for (int s = 0; s < d; ++s) out.psi(s * rank + j) = amp * v(s);
  }
  return out;
}

ComplexMatrix hermitian_from_params(std::span<const double> params, int m) {
  if (params.size() != static_cast<std::size_t>(m) * m) {
    throw InvalidArgument("hermitian_from_params: need m^2 parameters");
  }
  ComplexMatrix h = ComplexMatrix::Zero(m, m);
  std::size_t k = 0;
  for (int i = 0; i < m; ++i) h(i, i) = params[k++];
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      h(i, j) = Complex(params[k], params[k + 1]);
      h(j, i) = std::conj(h(i, j));
      k += 2;
    }
  }
  return h;
}

ComplexMatrix unitary_from_params(std::span<const double> params, int m) {
  return matrix_exp_hermitian(hermitian_from_params(params, m));
}

ComplexMatrix polar_isometry(const ComplexMatrix& z) {
  const ComplexMatrix gram = z.adjoint() * z;
  return z * matrix_inv_sqrt_on_support(gram, 1e-300);
}

ComplexVector phase_fixed(ComplexVector v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > 1e-8) {
      v *= std::conj(v(i)) / a;
      v(i) = a;
      break;
    }
  }
  return v;
}

int numerical_rank(const ComplexMatrix& p, double zero_tol) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(p), Eigen::EigenvaluesOnly);
  int r = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > zero_tol) ++r;
  return r;
}

}  // namespace qmi
