#include <algorithm>
#include <cmath>
#include <limits>

#include "netspec/linalg.hpp"

namespace netspec::linalg {

namespace {

cplx phase_of(const cplx& x) {
  const double m = std::abs(x);
  return m == 0.0 ? cplx(1.0, 0.0) : x / m;
}

// Householder similarity reduction to upper Hessenberg form.
void hessenberg_reduce(Matrix<cplx>& h) {
  const std::size_t n = h.rows();
  for (std::size_t j = 0; j + 2 < n; ++j) {
    double tail = 0.0;
    for (std::size_t i = j + 2; i < n; ++i) tail += std::norm(h(i, j));
    if (tail <= 1e-300) continue;
    const cplx x0 = h(j + 1, j);
    const double xnorm = std::sqrt(tail + std::norm(x0));
    // v = x + e^{i arg x0} ||x|| e_1 adds magnitudes, so no cancellation.
    std::vector<cplx> v(n - j - 1);
    v[0] = x0 + phase_of(x0) * xnorm;
    for (std::size_t i = j + 2; i < n; ++i) v[i - j - 1] = h(i, j);
    double vnorm_sq = 0.0;
    for (const cplx& vi : v) vnorm_sq += std::norm(vi);
    if (vnorm_sq == 0.0) continue;

    // Rows j+1..n-1: h <- P h, P = I - 2 v v^H / ||v||^2
    for (std::size_t c = 0; c < n; ++c) {
      cplx inner(0.0, 0.0);
      for (std::size_t i = 0; i < v.size(); ++i)
        inner += std::conj(v[i]) * h(j + 1 + i, c);
      const cplx scale = 2.0 * inner / vnorm_sq;
      for (std::size_t i = 0; i < v.size(); ++i)
        h(j + 1 + i, c) -= scale * v[i];
    }
    // Columns j+1..n-1: h <- h P
    for (std::size_t r = 0; r < n; ++r) {
      cplx inner(0.0, 0.0);
      for (std::size_t i = 0; i < v.size(); ++i)
        inner += h(r, j + 1 + i) * v[i];
      const cplx scale = 2.0 * inner / vnorm_sq;
      for (std::size_t i = 0; i < v.size(); ++i)
        h(r, j + 1 + i) -= scale * std::conj(v[i]);
    }
    for (std::size_t i = j + 2; i < n; ++i) h(i, j) = cplx(0.0, 0.0);
  }
}

struct Givens {
  double c;
  cplx s;
};

Givens make_givens(const cplx& f, const cplx& g) {
  const double af = std::abs(f), ag = std::abs(g);
  if (ag == 0.0) return {1.0, cplx(0.0, 0.0)};
  if (af == 0.0) return {0.0, std::conj(g) / ag};
  const double r = std::hypot(af, ag);
  return {af / r, (f / af) * std::conj(g) / static_cast<double>(r)};
}

void eig2x2(const cplx& a, const cplx& b, const cplx& c, const cplx& d,
            cplx& e1, cplx& e2) {
  const cplx tr_half = 0.5 * (a + d);
  const cplx dif_half = 0.5 * (a - d);
  const cplx disc = std::sqrt(dif_half * dif_half + b * c);
  e1 = tr_half + disc;
  e2 = tr_half - disc;
}

}  // namespace

std::vector<cplx> small_general_eig(const Matrix<cplx>& input) {
  if (input.rows() != input.cols())
    throw InfeasibleParameters("small_general_eig: matrix not square");
  const std::size_t n = input.rows();
  if (n > 8)
    throw InfeasibleParameters("small_general_eig: dimension exceeds 8");
  if (n == 0) return {};

  Matrix<cplx> h = input;
  hessenberg_reduce(h);

  std::vector<cplx> eig(n);
  const double eps = std::numeric_limits<double>::epsilon();
  std::size_t m = n;
  int iters = 0, since_deflation = 0;
  const int cap = 60 * static_cast<int>(n) + 60;

  while (m > 0) {
    for (std::size_t i = 0; i + 1 < m; ++i)
      if (std::abs(h(i + 1, i)) <=
          eps * (std::abs(h(i, i)) + std::abs(h(i + 1, i + 1))))
        h(i + 1, i) = cplx(0.0, 0.0);

    if (m == 1 || h(m - 1, m - 2) == cplx(0.0, 0.0)) {
      eig[m - 1] = h(m - 1, m - 1);
      --m;
      since_deflation = 0;
      continue;
    }
    if (m == 2 || h(m - 2, m - 3) == cplx(0.0, 0.0)) {
      // Finish a trailing 2x2 block in closed form.
      eig2x2(h(m - 2, m - 2), h(m - 2, m - 1), h(m - 1, m - 2),
             h(m - 1, m - 1), eig[m - 2], eig[m - 1]);
      m -= 2;
      since_deflation = 0;
      continue;
    }

    if (++iters > cap)
      throw NonConvergence("small_general_eig: iteration cap reached");

    // Active block [l, m): l is just past the last zero subdiagonal.
    std::size_t l = m - 1;
    while (l > 0 && h(l, l - 1) != cplx(0.0, 0.0)) --l;

    cplx mu;
    if (++since_deflation % 12 == 0) {
      mu = h(m - 1, m - 1) + cplx(0.75 * std::abs(h(m - 1, m - 2)), 0.0);
    } else {
      cplx e1, e2;
      eig2x2(h(m - 2, m - 2), h(m - 2, m - 1), h(m - 1, m - 2),
             h(m - 1, m - 1), e1, e2);
      const cplx w = h(m - 1, m - 1);
      mu = (std::abs(e1 - w) < std::abs(e2 - w)) ? e1 : e2;
    }

    for (std::size_t i = l; i < m; ++i) h(i, i) -= mu;
    std::vector<Givens> rots(m - 1 - l);
    for (std::size_t i = l; i + 1 < m; ++i) {
      const Givens g = make_givens(h(i, i), h(i + 1, i));
      rots[i - l] = g;
      for (std::size_t c2 = i; c2 < n; ++c2) {
        const cplx t1 = h(i, c2), t2 = h(i + 1, c2);
        h(i, c2) = g.c * t1 + g.s * t2;
        h(i + 1, c2) = -std::conj(g.s) * t1 + g.c * t2;
      }
      h(i + 1, i) = cplx(0.0, 0.0);
    }
    for (std::size_t i = l; i + 1 < m; ++i) {
      const Givens g = rots[i - l];
      for (std::size_t r = 0; r <= i + 1; ++r) {
        const cplx t1 = h(r, i), t2 = h(r, i + 1);
        h(r, i) = g.c * t1 + std::conj(g.s) * t2;
        h(r, i + 1) = -g.s * t1 + g.c * t2;
      }
    }
    for (std::size_t i = l; i < m; ++i) h(i, i) += mu;
  }
  return eig;
}

Matrix<cplx> solve_linear(Matrix<cplx> a, Matrix<cplx> b,
                          double* pivot_ratio_out) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.rows() != n)
    throw InfeasibleParameters("solve_linear: shape mismatch");

  double pmax = 0.0, pmin = std::numeric_limits<double>::infinity();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    const double pabs = std::abs(a(piv, col));
    pmax = std::max(pmax, pabs);
    pmin = std::min(pmin, pabs);
    if (pabs == 0.0) {
      if (pivot_ratio_out)
        *pivot_ratio_out = std::numeric_limits<double>::infinity();
      throw SingularC("solve_linear: zero pivot");
    }
    if (piv != col) {
      for (std::size_t c2 = 0; c2 < n; ++c2) std::swap(a(col, c2), a(piv, c2));
      for (std::size_t c2 = 0; c2 < b.cols(); ++c2)
        std::swap(b(col, c2), b(piv, c2));
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const cplx f = a(r, col) / a(col, col);
      if (f == cplx(0.0, 0.0)) continue;
      for (std::size_t c2 = col; c2 < n; ++c2) a(r, c2) -= f * a(col, c2);
      for (std::size_t c2 = 0; c2 < b.cols(); ++c2) b(r, c2) -= f * b(col, c2);
    }
  }
  if (pivot_ratio_out) *pivot_ratio_out = pmax / pmin;

  for (std::size_t col = n; col-- > 0;) {
    for (std::size_t c2 = 0; c2 < b.cols(); ++c2) {
      cplx s = b(col, c2);
      for (std::size_t k = col + 1; k < n; ++k) s -= a(col, k) * b(k, c2);
      b(col, c2) = s / a(col, col);
    }
  }
  return b;
}

}  // namespace netspec::linalg
