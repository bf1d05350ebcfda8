#include "qttrank/densela.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qttrank/compensated_sum.hpp"
#include "qttrank/errors.hpp"

namespace qtt {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

ConstRowMap as_eigen(const DenseMatrix& m) {
  return ConstRowMap(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                     static_cast<Eigen::Index>(m.cols()));
}

DenseMatrix from_eigen(const Eigen::MatrixXd& e) {
  DenseMatrix out(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  Eigen::Map<RowMatrix>(out.data().data(), e.rows(), e.cols()) = e;
  return out;
}

void require_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite entry");
  }
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::size_t count_above_noise(std::span<const double> sigma) {
  if (sigma.empty()) return 0;
  const double floor = noise_floor(sigma.front());
  return static_cast<std::size_t>(std::count_if(sigma.begin(), sigma.end(),
                                                [&](double s) { return s > 0.0 && s >= floor; }));
}

template <typename Svd>
void check_converged(const Svd& solver, std::size_t rows, std::size_t cols) {
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "svd did not converge for a " << rows << "x" << cols << " matrix (Eigen info="
       << static_cast<int>(solver.info()) << ")";
    throw NumericalError(os.str());
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    std::ostringstream os;
    os << "DenseMatrix: " << data_.size() << " entries for a " << rows_ << "x" << cols_
       << " matrix";
    throw DomainError(os.str());
  }
  require_finite(data_, "DenseMatrix");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DomainError("multiply: inner dimensions differ");
  DenseMatrix out(a.rows(), b.cols());
  Eigen::Map<RowMatrix>(out.data().data(), static_cast<Eigen::Index>(out.rows()),
                        static_cast<Eigen::Index>(out.cols())) = as_eigen(a) * as_eigen(b);
  return out;
}

SvdResult svd(const DenseMatrix& m) {
  require_finite(m.data(), "svd");
  if (m.rows() == 0 || m.cols() == 0) throw DomainError("svd: empty matrix");
  const Eigen::MatrixXd dense = as_eigen(m);
  Eigen::BDCSVD<Eigen::MatrixXd> solver(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
  check_converged(solver, m.rows(), m.cols());
  SvdResult out;
  out.left_vectors = from_eigen(solver.matrixU());
  out.singular_values = to_vector(solver.singularValues());
  out.right_vectors_t = from_eigen(solver.matrixV().transpose());
  out.above_noise = count_above_noise(out.singular_values);
  return out;
}

std::vector<double> singular_values(const DenseMatrix& m) {
  require_finite(m.data(), "singular_values");
  if (m.rows() == 0 || m.cols() == 0) return {};
  const Eigen::MatrixXd dense = as_eigen(m);
  Eigen::BDCSVD<Eigen::MatrixXd> solver(dense);
  check_converged(solver, m.rows(), m.cols());
  return to_vector(solver.singularValues());
}

LeftSingularFactor left_singular_factor(std::span<const double> row_major, std::size_t rows,
                                        std::size_t cols) {
  if (row_major.size() != rows * cols) throw DomainError("left_singular_factor: size mismatch");
  if (rows == 0 || cols == 0) throw DomainError("left_singular_factor: empty block");
  const auto r = static_cast<Eigen::Index>(rows);
  const auto c = static_cast<Eigen::Index>(cols);
  // A row-major rows x cols buffer is the column-major cols x rows transpose.
  Eigen::Map<const Eigen::MatrixXd> transpose(row_major.data(), c, r);

  Eigen::MatrixXd square;
  if (rows < cols) {
    // M^T = Q R  =>  M = R^T Q^T, and M shares left singular vectors and
    // singular values with the rows x rows factor R^T.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(transpose);
    square = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>().transpose();
  } else {
    square = transpose.transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> solver(square, Eigen::ComputeThinU);
  check_converged(solver, rows, cols);
  return {from_eigen(solver.matrixU()), to_vector(solver.singularValues())};
}

std::vector<double> tail_norms(std::span<const double> singular_values) {
  const std::size_t n = singular_values.size();
  std::vector<double> tails(n + 1, 0.0);
  CompensatedSum acc;
  for (std::size_t i = n; i-- > 0;) {
    acc.add(singular_values[i] * singular_values[i]);
    tails[i] = std::sqrt(std::max(acc.value(), 0.0));
  }
  return tails;
}

std::size_t eps_rank(std::span<const double> singular_values, double delta) {
  const std::vector<double> tails = tail_norms(singular_values);
  for (std::size_t r = 0; r < tails.size(); ++r) {
    if (tails[r] <= delta) return r;
  }
  return singular_values.size();
}

double spectral_norm(const DenseMatrix& m) {
  const std::vector<double> sigma = singular_values(m);
  return sigma.empty() ? 0.0 : sigma.front();
}

double frobenius_norm(const DenseMatrix& m) { return compensated_norm(m.data()); }

double min_eigenvalue_symmetric(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw DomainError("min_eigenvalue_symmetric: matrix is not square");
  require_finite(m.data(), "min_eigenvalue_symmetric");
  double scale = 0.0;
  for (double x : m.data()) scale = std::max(scale, std::abs(x));
  double asymmetry = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      asymmetry = std::max(asymmetry, std::abs(m(i, j) - m(j, i)));
  if (asymmetry > kSymmetryTolerance * scale) {
    std::ostringstream os;
    os << "min_eigenvalue_symmetric: asymmetry " << asymmetry << " exceeds " << kSymmetryTolerance
       << " relative to max entry " << scale;
    throw DomainError(os.str());
  }
  const auto e = as_eigen(m);
  const Eigen::MatrixXd sym = 0.5 * (e + e.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  return solver.eigenvalues().minCoeff();
}

double noise_floor(double sigma1) noexcept {
  return 1e2 * std::numeric_limits<double>::epsilon() * sigma1;
}

}  // namespace qtt
