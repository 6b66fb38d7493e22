#include <algorithm>
#include <cmath>
#include <limits>

#include "netspec/linalg.hpp"

namespace netspec::linalg {

bool DiagonalSpectrum::is_descending() const {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i - 1] < values[i]) return false;
  return true;
}

bool DiagonalSpectrum::is_strictly_descending() const {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i - 1] <= values[i]) return false;
  return true;
}

namespace {

constexpr int kIterationCap = 200;

struct RootResult {
  double root;
  int iterations;
};

// Value and derivative of the partial sums
//   psi(y) = rho * sum_{i<k} w_i / (lam_i - y)   (poles above the bracket)
//   phi(y) = rho * sum_{i>=k} w_i / (lam_i - y)  (poles at and below it)
struct PartialSums {
  double psi, dpsi, phi, dphi;
};

PartialSums eval_partials(const std::vector<double>& lam,
                          const std::vector<double>& w, double rho, int k,
                          double y) {
  PartialSums p{0.0, 0.0, 0.0, 0.0};
  const int n = static_cast<int>(lam.size());
  for (int i = 0; i < n; ++i) {
    const double d = lam[i] - y;
    const double t = rho * w[i] / d;
    if (i < k) {
      p.psi += t;
      p.dpsi += t / d;
    } else {
      p.phi += t;
      p.dphi += t / d;
    }
  }
  return p;
}

// Solve f(y) = 1 + psi(y) + phi(y) = 0 on the k-th interval for rho > 0.
// Each step fits one-pole rational approximants to psi and phi at the
// current iterate (value and slope), solves the resulting quadratic, and
// falls back to bisection of the safeguard bracket whenever the model step
// leaves it. For rho > 0, f is strictly increasing between poles, so the
// sign of f at the iterate always tells which half the root is in.
RootResult solve_weighted(const std::vector<double>& lam,
                          const std::vector<double>& w, double rho, int k,
                          double xi) {
  double wsum = 0.0;
  for (double wi : w) wsum += wi;

  double lo = lam[k];
  const double upper_pole = (k == 0) ? lam[0] + rho * wsum : lam[k - 1];
  double hi = upper_pole;
  if (!(lo < hi))
    throw InvalidBracket("secular_root: empty bracket at index " +
                         std::to_string(k));

  double y = 0.5 * (lo + hi);
  for (int iter = 1; iter <= kIterationCap; ++iter) {
    const PartialSums p = eval_partials(lam, w, rho, k, y);
    const double f = 1.0 + p.psi + p.phi;
    if (f > 0.0)
      hi = y;
    else
      lo = y;

    // Rational model: psi ~ pp + q/(d1 - y), phi ~ rr + s/(d2 - y), with
    // the poles pinned at the bracket ends and slopes matched at y.
    const double d2 = lam[k];
    const double s = p.dphi * (d2 - y) * (d2 - y);
    const double rr = p.phi - s / (d2 - y);

    double y_next;
    bool have_step = false;
    if (k == 0) {
      // psi is identically zero; the model equation is linear.
      const double a = 1.0 + rr;
      if (a > 0.0) {
        y_next = lam[0] + s / a;
        have_step = true;
      } else {
        y_next = 0.0;
      }
    } else {
      const double d1 = lam[k - 1];
      const double q = p.dpsi * (d1 - y) * (d1 - y);
      const double pp = p.psi - q / (d1 - y);
      const double a = 1.0 + pp + rr;
      const double qb = -(a * (d1 + d2) + q + s);
      const double qc = a * d1 * d2 + q * d2 + s * d1;
      const double disc = qb * qb - 4.0 * a * qc;
      y_next = 0.0;
      if (disc >= 0.0) {
        double r1, r2;
        if (a == 0.0) {
          r1 = r2 = (qb == 0.0) ? std::numeric_limits<double>::quiet_NaN()
                                : -qc / qb;
        } else {
          const double sq = std::sqrt(disc);
          const double u = (qb >= 0.0) ? (-qb - sq) : (-qb + sq);
          r1 = u / (2.0 * a);
          r2 = (u == 0.0) ? -qb / (2.0 * a) : (2.0 * qc) / u;
        }
        const bool in1 = r1 > lo && r1 < hi;
        const bool in2 = r2 > lo && r2 < hi;
        if (in1 != in2) {
          y_next = in1 ? r1 : r2;
          have_step = true;
        } else if (in1 && in2 && r1 == r2) {
          y_next = r1;
          have_step = true;
        }
      }
    }

    // The exact root can sit on the open upper end only for k = 0 (single
    // surviving term); allow it, the bracket test below keeps us safe.
    if (!have_step || std::isnan(y_next) || y_next <= lo || y_next > hi)
      y_next = 0.5 * (lo + hi);

    const double step = std::abs(y_next - y);
    y = y_next;
    if (step < xi) return {y, iter};
    // Bracket exhausted at floating-point resolution: accept the iterate.
    const double width = hi - lo;
    if (width <= 4.0 * std::numeric_limits<double>::epsilon() *
                     std::max(std::abs(hi), std::abs(lo)))
      return {y, iter};
  }
  throw NonConvergence("secular_root: no convergence at index " +
                       std::to_string(k));
}

double scaled_residual(const std::vector<double>& lam,
                       const std::vector<double>& w, double rho, double root) {
  double f = 1.0, scale = 1.0;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const double t = rho * w[i] / (lam[i] - root);
    f += t;
    scale += std::abs(t);
  }
  return std::abs(f) / scale;
}

}  // namespace

template <class S>
SecularSolveResult<S> secular_root(const std::vector<double>& lambda,
                                   const RankOneUpdate<S>& update, int k,
                                   double xi) {
  const int n = static_cast<int>(lambda.size());
  if (n == 0 || k < 0 || k >= n)
    throw InvalidBracket("secular_root: index out of range");
  if (update.rho == 0.0)
    throw InvalidBracket("secular_root: rho must be nonzero");
  if (static_cast<int>(update.z.size()) != n)
    throw InvalidBracket("secular_root: z size mismatch");
  for (int i = 1; i < n; ++i)
    if (!(lambda[i - 1] > lambda[i]))
      throw InvalidBracket("secular_root: eigenvalues not strictly descending");

  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = abs_sq(update.z[i]);

  RootResult r;
  if (update.rho > 0.0) {
    r = solve_weighted(lambda, w, update.rho, k, xi);
  } else {
    // Mirror transform: the j-th smallest eigenvalue of the downdate is the
    // negated (n-1-j)-th largest of the mirrored update.
    std::vector<double> lam_m(n), w_m(n);
    for (int i = 0; i < n; ++i) {
      lam_m[i] = -lambda[n - 1 - i];
      w_m[i] = w[n - 1 - i];
    }
    r = solve_weighted(lam_m, w_m, -update.rho, n - 1 - k, xi);
    r.root = -r.root;
  }

  SecularSolveResult<S> out;
  out.root = r.root;
  out.iterations = r.iterations;
  out.residual = scaled_residual(lambda, w, update.rho, r.root);
  out.eigenvector.resize(n);
  double nrm = 0.0;
  for (int i = 0; i < n; ++i) {
    out.eigenvector[i] = update.z[i] / (lambda[i] - r.root);
    nrm += abs_sq(out.eigenvector[i]);
  }
  nrm = std::sqrt(nrm);
  if (nrm > 0.0)
    for (int i = 0; i < n; ++i) out.eigenvector[i] /= nrm;
  return out;
}

template SecularSolveResult<double> secular_root<double>(
    const std::vector<double>&, const RankOneUpdate<double>&, int, double);
template SecularSolveResult<cplx> secular_root<cplx>(
    const std::vector<double>&, const RankOneUpdate<cplx>&, int, double);

}  // namespace netspec::linalg
