#include <algorithm>
#include <cmath>
#include <numeric>

#include "netspec/linalg.hpp"

namespace netspec::linalg {

namespace {

// First component of v = z - ||z|| e_1 without cancellation. When Re(z_1)
// is positive the direct difference loses digits; the rewritten form keeps
// only nonnegative summands in the numerator.
double stable_head_real(double re1, double im1, double tail_sq, double nb) {
  if (re1 <= 0.0) return re1 - nb;
  return -(tail_sq + im1 * im1) / (re1 + nb);
}

template <class S>
void apply_adjoint_reflector(const GroupReflector<S>& h, std::vector<S>& x) {
  // x <- (I - conj(beta) v v^H / ||v||^2) x restricted to h.idx
  double vnorm_sq = 0.0;
  for (const S& vi : h.v) vnorm_sq += abs_sq(vi);
  if (vnorm_sq == 0.0) return;
  S inner{};
  for (std::size_t j = 0; j < h.idx.size(); ++j)
    inner += conj_of(h.v[j]) * x[h.idx[j]];
  const S scale = conj_of(h.beta) * inner / S(vnorm_sq);
  for (std::size_t j = 0; j < h.idx.size(); ++j)
    x[h.idx[j]] -= scale * h.v[j];
}

}  // namespace

template <class S>
std::vector<S> DeflationRecord<S>::lift_reduced(
    const std::vector<S>& v_reduced) const {
  std::vector<S> x(perm.size(), S{});
  for (std::size_t j = 0; j < kept.size(); ++j) x[kept[j]] = v_reduced[j];
  for (const auto& h : reflectors) apply_adjoint_reflector(h, x);
  std::vector<S> out(perm.size(), S{});
  for (std::size_t i = 0; i < perm.size(); ++i) out[perm[i]] = x[i];
  return out;
}

template <class S>
std::vector<S> DeflationRecord<S>::lift_passthrough(int sorted_pos) const {
  std::vector<S> x(perm.size(), S{});
  x[sorted_pos] = S{1};
  for (const auto& h : reflectors) apply_adjoint_reflector(h, x);
  std::vector<S> out(perm.size(), S{});
  for (std::size_t i = 0; i < perm.size(); ++i) out[perm[i]] = x[i];
  return out;
}

template <class S>
Matrix<S> DeflationRecord<S>::assemble_reflectors() const {
  const std::size_t n = perm.size();
  Matrix<S> h = Matrix<S>::identity(n);
  for (const auto& r : reflectors) {
    double vnorm_sq = 0.0;
    for (const S& vi : r.v) vnorm_sq += abs_sq(vi);
    if (vnorm_sq == 0.0) continue;
    // h <- H_r * h, with H_r = I - beta v v^H / ||v||^2 on r.idx
    for (std::size_t col = 0; col < n; ++col) {
      S inner{};
      for (std::size_t j = 0; j < r.idx.size(); ++j)
        inner += conj_of(r.v[j]) * h(r.idx[j], col);
      const S scale = r.beta * inner / S(vnorm_sq);
      for (std::size_t j = 0; j < r.idx.size(); ++j)
        h(r.idx[j], col) -= scale * r.v[j];
    }
  }
  return h;
}

template <class S>
DeflationRecord<S> deflate(const DiagonalSpectrum& spectrum,
                           const RankOneUpdate<S>& update, double eps) {
  const std::size_t n = spectrum.size();
  if (update.z.size() != n)
    throw InvalidBracket("deflate: z size mismatch");

  DeflationRecord<S> rec;
  rec.rho = update.rho;
  rec.perm.resize(n);
  std::iota(rec.perm.begin(), rec.perm.end(), 0);
  std::stable_sort(rec.perm.begin(), rec.perm.end(), [&](int a, int b) {
    return spectrum.values[a] > spectrum.values[b];
  });

  std::vector<double> lam(n);
  std::vector<S> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    lam[i] = spectrum.values[rec.perm[i]];
    z[i] = update.z[rec.perm[i]];
  }

  const double znorm = norm2(z);
  std::vector<bool> live(n);
  for (std::size_t i = 0; i < n; ++i)
    live[i] = std::abs(z[i]) > eps * znorm;

  // Runs of near-equal eigenvalues; chain over consecutive sorted values so
  // a zero-weight entry inside a cluster does not split it.
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n &&
           lam[j - 1] - lam[j] <= eps * std::max(1.0, std::abs(lam[j - 1])))
      ++j;

    std::vector<int> members;
    for (std::size_t m = i; m < j; ++m)
      if (live[m]) members.push_back(static_cast<int>(m));

    if (members.size() >= 2) {
      GroupReflector<S> h;
      h.idx = members;
      double block_sq = 0.0, tail_sq = 0.0;
      for (std::size_t m = 0; m < members.size(); ++m) {
        block_sq += abs_sq(z[members[m]]);
        if (m > 0) tail_sq += abs_sq(z[members[m]]);
      }
      const double nb = std::sqrt(block_sq);
      const S z1 = z[members[0]];
      h.v.resize(members.size());
      if constexpr (std::is_same_v<S, cplx>) {
        h.v[0] = cplx(stable_head_real(z1.real(), z1.imag(), tail_sq, nb),
                      z1.imag());
      } else {
        h.v[0] = stable_head_real(z1, 0.0, tail_sq, nb);
      }
      for (std::size_t m = 1; m < members.size(); ++m) h.v[m] = z[members[m]];
      double vnorm_sq = 0.0;
      S vhz{};
      for (std::size_t m = 0; m < members.size(); ++m) {
        vnorm_sq += abs_sq(h.v[m]);
        vhz += conj_of(h.v[m]) * z[members[m]];
      }
      h.beta = S(vnorm_sq) / vhz;
      rec.reflectors.push_back(std::move(h));

      rec.kept.push_back(members[0]);
      rec.reduced_lambda.push_back(lam[members[0]]);
      rec.reduced_z.push_back(S(nb));
      for (std::size_t m = 1; m < members.size(); ++m)
        rec.passthrough.push_back(members[m]);
    } else if (members.size() == 1) {
      rec.kept.push_back(members[0]);
      rec.reduced_lambda.push_back(lam[members[0]]);
      rec.reduced_z.push_back(z[members[0]]);
    }
    for (std::size_t m = i; m < j; ++m)
      if (!live[m]) rec.passthrough.push_back(static_cast<int>(m));
    i = j;
  }
  std::sort(rec.passthrough.begin(), rec.passthrough.end());
  return rec;
}

template struct DeflationRecord<double>;
template struct DeflationRecord<cplx>;
template DeflationRecord<double> deflate<double>(const DiagonalSpectrum&,
                                                 const RankOneUpdate<double>&,
                                                 double);
template DeflationRecord<cplx> deflate<cplx>(const DiagonalSpectrum&,
                                             const RankOneUpdate<cplx>&,
                                             double);

}  // namespace netspec::linalg
