#include <algorithm>
#include <cmath>
#include <numeric>

#include "netspec/linalg.hpp"

namespace netspec::linalg {

namespace {

template <class S>
double off_diagonal_norm(const Matrix<S>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += abs_sq(a(i, j));
  return std::sqrt(s);
}

}  // namespace

template <class S>
EigResult<S> dense_eig_oracle(const Matrix<S>& input) {
  if (input.rows() != input.cols())
    throw NotHermitian("dense_eig_oracle: matrix not square");
  const std::size_t n = input.rows();
  if (hermitian_defect(input) > 1e-10 * std::max(1.0, max_abs(input)))
    throw NotHermitian("dense_eig_oracle: matrix not Hermitian");

  Matrix<S> a = input;
  // Symmetrize exactly so rounding in the caller cannot bias one triangle.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const S m = S(0.5) * (a(i, j) + conj_of(a(j, i)));
      a(i, j) = m;
      a(j, i) = conj_of(m);
    }
    a(i, i) = S(real_of(a(i, i)));
  }
  Matrix<S> u = Matrix<S>::identity(n);

  const double fro = std::max(frobenius_norm(a), 1e-300);
  const int max_sweeps = 64;
  int sweep = 0;
  while (off_diagonal_norm(a) > 1e-14 * fro) {
    if (++sweep > max_sweeps)
      throw NonConvergence("dense_eig_oracle: sweep cap reached");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = std::abs(a(p, q));
        if (apq <= 1e-300) continue;
        // Unitary 2x2 that annihilates a(p,q): the real rotation for the
        // moduli, carried onto the complex plane by the phase of a(p,q).
        const double app = real_of(a(p, p));
        const double aqq = real_of(a(q, q));
        const double tau = (aqq - app) / (2.0 * apq);
        const double t =
            (tau >= 0.0 ? -1.0 : 1.0) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const S omega = a(p, q) / S(apq);
        const S s = S(t * c) * omega;

        // Columns: [up, uq] <- [up*c + uq*conj(s) ... ]; rows get the
        // adjoint. Written out to keep one pass over the matrix.
        for (std::size_t r = 0; r < n; ++r) {
          const S arp = a(r, p), arq = a(r, q);
          a(r, p) = arp * S(c) + arq * conj_of(s);
          a(r, q) = arq * S(c) - arp * s;
        }
        for (std::size_t cidx = 0; cidx < n; ++cidx) {
          const S apc = a(p, cidx), aqc = a(q, cidx);
          a(p, cidx) = apc * S(c) + aqc * s;
          a(q, cidx) = aqc * S(c) - apc * conj_of(s);
        }
        a(p, q) = S{};
        a(q, p) = S{};
        a(p, p) = S(real_of(a(p, p)));
        a(q, q) = S(real_of(a(q, q)));
        for (std::size_t r = 0; r < n; ++r) {
          const S urp = u(r, p), urq = u(r, q);
          u(r, p) = urp * S(c) + urq * conj_of(s);
          u(r, q) = urq * S(c) - urp * s;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return real_of(a(x, x)) > real_of(a(y, y));
  });

  EigResult<S> out;
  out.values.resize(n);
  out.vectors = Matrix<S>(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = real_of(a(order[j], order[j]));
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = u(i, order[j]);
  }
  return out;
}

template EigResult<double> dense_eig_oracle<double>(const Matrix<double>&);
template EigResult<cplx> dense_eig_oracle<cplx>(const Matrix<cplx>&);

}  // namespace netspec::linalg
