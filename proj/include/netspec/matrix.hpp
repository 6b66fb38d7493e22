#ifndef NETSPEC_MATRIX_HPP
#define NETSPEC_MATRIX_HPP

#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace netspec {

using cplx = std::complex<double>;

/// Conjugate that collapses to identity for real scalars, so numeric code
/// can be written once for double and std::complex<double>.
inline double conj_of(double x) { return x; }
inline cplx conj_of(const cplx& x) { return std::conj(x); }

inline double abs_sq(double x) { return x * x; }
inline double abs_sq(const cplx& x) { return std::norm(x); }

inline double real_of(double x) { return x; }
inline double real_of(const cplx& x) { return x.real(); }

/// Minimal dense row-major matrix. The library works with small dense
/// matrices (node counts, antenna counts); nothing here is tuned for size.
template <class T>
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  const T& operator()(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

 private:
  std::size_t rows_, cols_;
  std::vector<T> data_;
};

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  assert(a.cols() == b.rows());
  Matrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T aik = a(i, k);
      if (aik == T{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

template <class T>
Matrix<T> adjoint(const Matrix<T>& a) {
  Matrix<T> r(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = conj_of(a(i, j));
  return r;
}

template <class T>
double frobenius_norm(const Matrix<T>& a) {
  double s = 0.0;
  for (const T& v : a.data()) s += abs_sq(v);
  return std::sqrt(s);
}

template <class T>
double max_abs(const Matrix<T>& a) {
  double m = 0.0;
  for (const T& v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

/// max |A - A^H|; zero for an exactly Hermitian matrix.
template <class T>
double hermitian_defect(const Matrix<T>& a) {
  assert(a.rows() == a.cols());
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j)
      m = std::max(m, std::abs(a(i, j) - conj_of(a(j, i))));
  return m;
}

/// ||A^H A - I||_max, the unitarity defect of the columns.
template <class T>
double orthonormality_defect(const Matrix<T>& a) {
  Matrix<T> g = adjoint(a) * a;
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= T{1};
  return max_abs(g);
}

template <class T>
std::vector<T> mat_vec(const Matrix<T>& a, const std::vector<T>& x) {
  assert(a.cols() == x.size());
  std::vector<T> y(a.rows(), T{});
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

/// <x, y> with conjugation on the first argument.
template <class T>
T dot(const std::vector<T>& x, const std::vector<T>& y) {
  assert(x.size() == y.size());
  T s{};
  for (std::size_t i = 0; i < x.size(); ++i) s += conj_of(x[i]) * y[i];
  return s;
}

template <class T>
double norm2_sq(const std::vector<T>& x) {
  double s = 0.0;
  for (const T& v : x) s += abs_sq(v);
  return s;
}

template <class T>
double norm2(const std::vector<T>& x) {
  return std::sqrt(norm2_sq(x));
}

}  // namespace netspec

#endif
