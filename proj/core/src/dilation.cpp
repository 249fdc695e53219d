#include "pcshape/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pcshape/error.hpp"

namespace pcshape {

namespace {

constexpr double kContractionSlack = 1e-12;
constexpr double kSolvedContractionSlack = 1e-9;
constexpr double kOrthogonalityTolerance = 1e-10;

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

// Right-multiplies the active prefix of a row vector by G(gamma) at (p, p+1).
void apply_givens_right(Eigen::RowVectorXd& r, Index p, double gamma) {
  const double d = defect(gamma);
  const double a = r(p);
  const double b = r(p + 1);
  r(p) = a * gamma + b * d;
  r(p + 1) = a * d - b * gamma;
}

// Right-multiplies a matrix by G(gamma) at columns (p, p+1).
void apply_givens_right(Eigen::MatrixXd& m, Index p, double gamma) {
  const double d = defect(gamma);
  const Eigen::VectorXd a = m.col(p);
  const Eigen::VectorXd b = m.col(p + 1);
  m.col(p) = gamma * a + d * b;
  m.col(p + 1) = d * a - gamma * b;
}

double product_of_defects_row(const SchurParams& params, std::size_t k, std::size_t j) {
  double p = 1.0;
  for (std::size_t l = k + 1; l < j; ++l) p *= defect(params(k, l));
  return p;
}

double product_of_defects_column(const SchurParams& params, std::size_t k, std::size_t j) {
  double p = 1.0;
  for (std::size_t l = k + 1; l < j; ++l) p *= defect(params(l, j));
  return p;
}

// L_{k,j-1} U_{k+1,j-1} C_{k+1,j} in O((j-k)^2): the row vector is pushed
// through the nested Givens products of U without forming U.
double coupling_term(const SchurParams& params, std::size_t k, std::size_t j) {
  if (j <= k + 1) return 0.0;
  Eigen::RowVectorXd r = row_contraction(params, k, j - 1);
  for (std::size_t a = k + 1; a + 1 < j; ++a) {
    // Active prefix has length j - a; U_{a, j-1} acts on it.
    const std::size_t active = j - a;
    for (std::size_t l = 1; l < active; ++l) {
      apply_givens_right(r, idx(l - 1), params(a, a + l));
    }
  }
  return r.dot(column_contraction(params, k + 1, j));
}

}  // namespace

SchurParams::SchurParams(std::size_t n) : n_(n), gamma_(Eigen::MatrixXd::Zero(idx(n), idx(n))) {
  if (n == 0) throw Error(Errc::bad_dim, "SchurParams size must be positive");
}

void SchurParams::check_index(std::size_t i, std::size_t j) const {
  if (!(i < j && j < n_)) {
    std::ostringstream os;
    os << "parameter index (" << i << ", " << j << ") outside the triangle of size " << n_;
    throw Error(Errc::index_error, os.str());
  }
}

double SchurParams::operator()(std::size_t i, std::size_t j) const {
  check_index(i, j);
  return gamma_(idx(i), idx(j));
}

void SchurParams::set(std::size_t i, std::size_t j, double value) {
  check_index(i, j);
  if (!(std::abs(value) <= 1.0)) {
    std::ostringstream os;
    os << "gamma(" << i << ", " << j << ") = " << value << " is not a contraction";
    throw Error(Errc::out_of_range, os.str());
  }
  gamma_(idx(i), idx(j)) = value;
}

bool SchurParams::is_boundary(std::size_t i, std::size_t j) const {
  return std::abs(std::abs((*this)(i, j)) - 1.0) <= kBoundaryTolerance;
}

void SchurParams::mark_degenerate(std::size_t i, std::size_t j) {
  check_index(i, j);
  degenerate_.emplace_back(i, j);
}

DilationSequence::DilationSequence(std::vector<Eigen::MatrixXd> matrices)
    : matrices_(std::move(matrices)) {
  if (matrices_.empty()) throw Error(Errc::bad_dim, "dilation sequence is empty");
  dim_ = static_cast<std::size_t>(matrices_.front().rows());
  for (std::size_t i = 0; i < matrices_.size(); ++i) {
    const Eigen::MatrixXd& w = matrices_[i];
    if (w.rows() != w.cols() || static_cast<std::size_t>(w.rows()) != dim_) {
      throw Error(Errc::dim_mismatch, "dilation matrices must share one square size");
    }
    const double err = (w.transpose() * w - Eigen::MatrixXd::Identity(w.rows(), w.cols()))
                           .cwiseAbs()
                           .maxCoeff();
    if (err >= kOrthogonalityTolerance) {
      std::ostringstream os;
      os << "W_" << i << " has |W^T W - I|_max = " << err;
      throw Error(Errc::not_orthogonal, os.str());
    }
    const int sign = w.determinant() > 0.0 ? 1 : -1;
    if (i == 0) {
      det_sign_ = sign;
    } else if (sign != det_sign_) {
      throw Error(Errc::wrong_component, "dilation matrices have mixed determinant signs");
    }
  }
}

double defect(double gamma) {
  if (!(std::abs(gamma) <= 1.0)) {
    std::ostringstream os;
    os << "defect of " << gamma << " is undefined";
    throw Error(Errc::out_of_range, os.str());
  }
  return std::sqrt((1.0 - gamma) * (1.0 + gamma));
}

Eigen::MatrixXd givens(double gamma, std::size_t position, std::size_t dim) {
  const double d = defect(gamma);
  if (dim < 2 || position + 1 >= dim) {
    std::ostringstream os;
    os << "position " << position << " invalid for dimension " << dim;
    throw Error(Errc::bad_position, os.str());
  }
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(idx(dim), idx(dim));
  const Index p = idx(position);
  g(p, p) = gamma;
  g(p, p + 1) = d;
  g(p + 1, p) = d;
  g(p + 1, p + 1) = -gamma;
  return g;
}

Eigen::Matrix2d julia_operator(double gamma) { return givens(gamma, 0, 2); }

Contraction extract_contraction(double x, double y, double z) {
  if (!(x > 0.0) || !(z > 0.0)) {
    throw Error(Errc::out_of_range, "diagonal blocks must be positive");
  }
  const double value = y / (std::sqrt(x) * std::sqrt(z));
  if (std::abs(value) > 1.0 + kContractionSlack) {
    std::ostringstream os;
    os << "|y| / sqrt(xz) = " << std::abs(value) << " > 1";
    throw Error(Errc::not_a_contraction, os.str());
  }
  const bool boundary = std::abs(std::abs(value) - 1.0) <= kBoundaryTolerance;
  return {std::clamp(value, -1.0, 1.0), boundary};
}

Eigen::RowVectorXd row_contraction(const SchurParams& params, std::size_t k, std::size_t j) {
  if (!(k < j && j < params.size())) throw Error(Errc::index_error, "row contraction needs k < j < n");
  Eigen::RowVectorXd out(idx(j - k));
  double p = 1.0;
  for (std::size_t l = k + 1; l <= j; ++l) {
    const double g = params(k, l);
    out(idx(l - k - 1)) = p * g;
    p *= defect(g);
  }
  return out;
}

Eigen::VectorXd column_contraction(const SchurParams& params, std::size_t k, std::size_t j) {
  if (!(k < j && j < params.size())) {
    throw Error(Errc::index_error, "column contraction needs k < j < n");
  }
  Eigen::VectorXd out(idx(j - k));
  double p = 1.0;
  for (std::size_t m = j; m-- > k;) {
    const double g = params(m, j);
    out(idx(j - 1 - m)) = g * p;
    p *= defect(g);
  }
  return out;
}

Eigen::MatrixXd upper_unitary(const SchurParams& params, std::size_t k, std::size_t j) {
  if (!(k <= j && j < params.size())) throw Error(Errc::index_error, "upper_unitary needs k <= j < n");
  const Index size = idx(j - k + 1);
  if (size == 1) return Eigen::MatrixXd::Identity(1, 1);
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(size, size);
  for (std::size_t l = k + 1; l <= j; ++l) {
    apply_givens_right(p, idx(l - k - 1), params(k, l));
  }
  Eigen::MatrixXd inner = Eigen::MatrixXd::Identity(size, size);
  inner.topLeftCorner(size - 1, size - 1) = upper_unitary(params, k + 1, j);
  return p * inner;
}

double schur_reconstruct_entry(const SchurParams& params, std::size_t k, std::size_t j) {
  if (!(k < j && j < params.size())) {
    std::ostringstream os;
    os << "entry (" << k << ", " << j << ") is not above the diagonal of size " << params.size();
    throw Error(Errc::index_error, os.str());
  }
  if (j == k + 1) return params(k, j);
  return coupling_term(params, k, j) + product_of_defects_row(params, k, j) * params(k, j) *
                                           product_of_defects_column(params, k, j);
}

Eigen::MatrixXd schur_reconstruct(const SchurParams& params) {
  const std::size_t n = params.size();
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(idx(n), idx(n));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = k + 1; j < n; ++j) {
      R(idx(k), idx(j)) = R(idx(j), idx(k)) = schur_reconstruct_entry(params, k, j);
    }
  }
  return R;
}

SchurParams extract_schur_params(const CorrelationMatrix& R) {
  const std::size_t n = R.size();
  SchurParams params(n);
  for (std::size_t lag = 1; lag < n; ++lag) {
    for (std::size_t k = 0; k + lag < n; ++k) {
      const std::size_t j = k + lag;
      if (lag == 1) {
        params.set(k, j, extract_contraction(1.0, R(k, j), 1.0).value);
        continue;
      }
      const double defects =
          product_of_defects_row(params, k, j) * product_of_defects_column(params, k, j);
      if (defects < kDefectFloor) {
        params.mark_degenerate(k, j);
        continue;
      }
      const double gamma = (R(k, j) - coupling_term(params, k, j)) / defects;
      if (std::abs(gamma) > 1.0 + kSolvedContractionSlack) {
        std::ostringstream os;
        os << "solved gamma(" << k << ", " << j << ") = " << gamma;
        throw Error(Errc::not_a_contraction, os.str());
      }
      params.set(k, j, std::clamp(gamma, -1.0, 1.0));
    }
  }
  return params;
}

DilationSequence build_dilation_sequence(const SchurParams& params, std::size_t dim,
                                         Coverage coverage) {
  const std::size_t n = params.size();
  if (dim < 2 || dim > n) {
    std::ostringstream os;
    os << "dim " << dim << " must lie in [2, " << n << "]";
    throw Error(Errc::bad_dim, os.str());
  }
  const std::size_t count = coverage == Coverage::full ? n - dim + 1 : n - 1;
  std::vector<Eigen::MatrixXd> matrices;
  matrices.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(idx(dim), idx(dim));
    for (std::size_t l = 1; l < dim; ++l) {
      const double g = i + l < n ? params(i, i + l) : 0.0;
      apply_givens_right(w, idx(l - 1), g);
    }
    matrices.push_back(std::move(w));
  }
  return DilationSequence(std::move(matrices));
}

Eigen::MatrixXd naimark_matrix(const std::vector<double>& parcors, std::size_t dim) {
  if (dim < 2) throw Error(Errc::bad_dim, "Naimark matrix needs dim >= 2");
  // g[l] for l = 1 .. dim; g[dim] closes the truncated last column.
  std::vector<double> g(dim + 1, 0.0);
  for (std::size_t l = 1; l < dim; ++l) {
    if (l <= parcors.size()) {
      defect(parcors[l - 1]);  // range check
      g[l] = parcors[l - 1];
    }
  }
  g[dim] = 1.0;
  std::vector<double> d(dim + 1, 0.0);
  for (std::size_t l = 1; l < dim; ++l) d[l] = defect(g[l]);

  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(idx(dim), idx(dim));
  for (std::size_t c = 0; c < dim; ++c) {
    double chain = 1.0;
    for (std::size_t l = 1; l <= c; ++l) chain *= d[l];
    u(0, idx(c)) = chain * g[c + 1];
  }
  for (std::size_t r = 1; r < dim; ++r) {
    u(idx(r), idx(r - 1)) = d[r];
    for (std::size_t c = r; c < dim; ++c) {
      double chain = 1.0;
      for (std::size_t l = r + 1; l <= c; ++l) chain *= d[l];
      u(idx(r), idx(c)) = -g[r] * chain * g[c + 1];
    }
  }
  return u;
}

double reconstruct_correlation(const DilationSequence& seq, std::size_t i, std::size_t j) {
  if (!(i < j)) throw Error(Errc::index_error, "reconstruction needs i < j");
  if (j - i > seq.dim() - 1) {
    std::ostringstream os;
    os << "lag " << j - i << " exceeds the window " << seq.dim() - 1 << " of dim " << seq.dim();
    throw Error(Errc::truncation_window_exceeded, os.str());
  }
  if (j - 1 >= seq.count()) {
    std::ostringstream os;
    os << "W_" << j - 1 << " is past the end of a sequence of " << seq.count();
    throw Error(Errc::index_error, os.str());
  }
  // Only the first row is needed: e1^T W_i ... W_{j-1}.
  Eigen::RowVectorXd row = seq[i].row(0);
  for (std::size_t k = i + 1; k < j; ++k) row = row * seq[k];
  return row(0);
}

Eigen::MatrixXd reconstruct_band(const DilationSequence& seq, std::size_t max_lag) {
  if (max_lag > seq.dim() - 1) {
    std::ostringstream os;
    os << "lag " << max_lag << " exceeds the window " << seq.dim() - 1;
    throw Error(Errc::truncation_window_exceeded, os.str());
  }
  const std::size_t n = seq.count() + 1;
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(idx(n), idx(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n && j - i <= max_lag; ++j) {
      R(idx(i), idx(j)) = R(idx(j), idx(i)) = reconstruct_correlation(seq, i, j);
    }
  }
  return R;
}

LevinsonResult levinson(const std::vector<double>& toeplitz_row) {
  if (toeplitz_row.empty() || std::abs(toeplitz_row.front() - 1.0) > 1e-12) {
    throw Error(Errc::out_of_range, "Toeplitz row must start with 1");
  }
  const std::size_t n = toeplitz_row.size();
  LevinsonResult out;
  std::vector<double> phi;  // phi[i-1] = prediction coefficient of lag i
  double error = 1.0;
  for (std::size_t m = 1; m < n; ++m) {
    if (!(error > 0.0)) {
      std::ostringstream os;
      os << "prediction error " << error << " at order " << m - 1;
      throw Error(Errc::singular_step, os.str());
    }
    double num = toeplitz_row[m];
    for (std::size_t i = 1; i < m; ++i) num -= phi[i - 1] * toeplitz_row[m - i];
    const double k = num / error;
    std::vector<double> next(m);
    for (std::size_t i = 1; i < m; ++i) next[i - 1] = phi[i - 1] - k * phi[m - i - 1];
    next[m - 1] = k;
    phi = std::move(next);
    error *= (1.0 - k) * (1.0 + k);
    out.reflection.push_back(k);
    out.prediction_error.push_back(error);
  }
  if (n > 1 && !(error > 0.0)) {
    std::ostringstream os;
    os << "prediction error " << error << " at order " << n - 1;
    throw Error(Errc::singular_step, os.str());
  }
  return out;
}

}  // namespace pcshape
