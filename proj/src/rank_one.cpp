#include <algorithm>
#include <cmath>
#include <numeric>

#include "netspec/linalg.hpp"

namespace netspec::linalg {

template <class S>
EigenUpdateResult<S> rank_one_eigenupdate(const DiagonalSpectrum& spectrum,
                                          const RankOneUpdate<S>& update,
                                          double xi) {
  const std::size_t n = spectrum.size();
  EigenUpdateResult<S> out;
  if (n == 0) return out;

  if (norm2_sq(update.z) == 0.0) {
    out.spectrum = spectrum;
    out.basis = Matrix<S>::identity(n);
    return out;
  }

  const DeflationRecord<S> rec = deflate(spectrum, update);
  const std::size_t m = rec.reduced_lambda.size();

  RankOneUpdate<S> reduced{update.rho, rec.reduced_z};

  // Candidate columns: secular roots first (already descending), then the
  // passthrough pairs. A stable merge keeps ties deterministic across nodes.
  std::vector<double> vals;
  std::vector<std::vector<S>> cols;
  vals.reserve(n);
  cols.reserve(n);
  for (std::size_t k = 0; k < m; ++k) {
    const auto sol = secular_root(rec.reduced_lambda, reduced,
                                  static_cast<int>(k), xi);
    vals.push_back(sol.root);
    cols.push_back(rec.lift_reduced(sol.eigenvector));
  }
  std::vector<double> sorted_lam(n);
  for (std::size_t i = 0; i < n; ++i)
    sorted_lam[i] = spectrum.values[rec.perm[i]];
  for (int pos : rec.passthrough) {
    vals.push_back(sorted_lam[pos]);
    cols.push_back(rec.lift_passthrough(pos));
  }

  std::vector<int> order(vals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return vals[a] > vals[b]; });

  out.spectrum.values.resize(n);
  out.basis = Matrix<S>(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.spectrum.values[c] = vals[order[c]];
    for (std::size_t r = 0; r < n; ++r) out.basis(r, c) = cols[order[c]][r];
  }
  return out;
}

template EigenUpdateResult<double> rank_one_eigenupdate<double>(
    const DiagonalSpectrum&, const RankOneUpdate<double>&, double);
template EigenUpdateResult<cplx> rank_one_eigenupdate<cplx>(
    const DiagonalSpectrum&, const RankOneUpdate<cplx>&, double);

}  // namespace netspec::linalg
