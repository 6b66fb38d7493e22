#ifndef NETSPEC_LINALG_HPP
#define NETSPEC_LINALG_HPP

#include <complex>
#include <vector>

#include "netspec/errors.hpp"
#include "netspec/matrix.hpp"

namespace netspec::linalg {

/// Eigenvalues stored in descending order. Ties are allowed in general;
/// the secular solver requires strict descent, which deflation restores.
struct DiagonalSpectrum {
  std::vector<double> values;

  DiagonalSpectrum() = default;
  explicit DiagonalSpectrum(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  bool is_descending() const;
  bool is_strictly_descending() const;
};

/// Symmetric (Hermitian) rank-one modification rho * z z^H. rho may be any
/// nonzero real; its magnitude can always be absorbed into z, so most code
/// passes +1 or -1.
template <class S>
struct RankOneUpdate {
  double rho = 1.0;
  std::vector<S> z;
};

/// One root of the modified eigenproblem plus the diagnostics the property
/// tests look at. residual is |f(root)| divided by the sum of the absolute
/// values of the terms of f, a backward-error style measure.
template <class S>
struct SecularSolveResult {
  double root = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::vector<S> eigenvector;
};

/// Solve for the k-th root (k counts from zero, largest root first) of
///   f(lambda) = 1 + rho * sum_i |z_i|^2 / (lambda_i - lambda) = 0
/// by the two-sided rational approximation iteration with a safeguarded
/// shrinking bracket. Requires strictly descending lambda and rho != 0;
/// negative rho is handled internally by the mirror transform
/// lambda_i -> -lambda_{N-1-i}. Stops when successive iterates differ by
/// less than xi or the bracket reaches floating-point resolution.
///
/// Throws InvalidBracket on tied lambdas, NonConvergence after 200 steps.
template <class S>
SecularSolveResult<S> secular_root(const std::vector<double>& lambda,
                                   const RankOneUpdate<S>& update, int k,
                                   double xi = 1e-12);

/// Unitary reflector acting on an explicit index subset. Stored as the
/// Householder vector v and the factor beta = ||v||^2 / (v^H z); the matrix
/// I - beta v v^H / ||v||^2 is assembled on demand.
template <class S>
struct GroupReflector {
  std::vector<int> idx;  // positions (in sorted order) the reflector touches
  std::vector<S> v;
  S beta{};
};

/// Everything needed to reduce a possibly degenerate problem to one with
/// strictly descending eigenvalues and nonzero weights, and to map reduced
/// eigenvectors back to the original index order.
template <class S>
struct DeflationRecord {
  double rho = 1.0;
  std::vector<int> perm;       // sorted position i came from input index perm[i]
  std::vector<GroupReflector<S>> reflectors;
  std::vector<int> kept;         // sorted positions that stay in the reduced problem
  std::vector<int> passthrough;  // sorted positions whose eigenpair is final
  std::vector<double> reduced_lambda;  // strictly descending
  std::vector<S> reduced_z;            // all entries above threshold

  /// Map a reduced-problem eigenvector back to the input index order.
  std::vector<S> lift_reduced(const std::vector<S>& v_reduced) const;
  /// Eigenvector of a passthrough position, in the input index order.
  std::vector<S> lift_passthrough(int sorted_pos) const;
  /// Dense reflector product H with z_sorted mapped to H z_sorted; used by
  /// tests to check unitarity.
  Matrix<S> assemble_reflectors() const;
};

/// Split off zero weights and collapse repeated eigenvalues so the secular
/// solver sees a strictly descending spectrum with nonzero weights.
/// Entries with |z_i| <= eps * ||z|| pass through unchanged; runs of
/// eigenvalues closer than eps * max(1, |lambda|) are collapsed by a
/// reflector that concentrates the run's weight in its first position.
template <class S>
DeflationRecord<S> deflate(const DiagonalSpectrum& spectrum,
                           const RankOneUpdate<S>& update,
                           double eps = 1e-10);

template <class S>
struct EigenUpdateResult {
  DiagonalSpectrum spectrum;  // descending, ties possible via passthrough
  Matrix<S> basis;            // unitary V; updated basis is U_old * V
};

/// Full rank-one eigenupdate: deflate, solve every secular root, undo the
/// deflation, and merge with passthrough pairs in descending order.
template <class S>
EigenUpdateResult<S> rank_one_eigenupdate(const DiagonalSpectrum& spectrum,
                                          const RankOneUpdate<S>& update,
                                          double xi = 1e-12);

template <class S>
struct EigResult {
  std::vector<double> values;  // descending
  Matrix<S> vectors;           // columns match values
};

/// Reference eigendecomposition by cyclic two-sided Jacobi rotations.
/// Deliberately shares no code with the secular-equation path; used as the
/// independent check and for centralized replays. Throws NotHermitian when
/// max |A - A^H| exceeds 1e-10 * max(1, max |A|).
template <class S>
EigResult<S> dense_eig_oracle(const Matrix<S>& a);

/// Eigenvalues of a small (n <= 8) general complex matrix via Householder
/// Hessenberg reduction and shifted QR. Only the values are produced.
std::vector<cplx> small_general_eig(const Matrix<cplx>& a);

/// Solve A X = B for small complex systems by partial-pivot elimination.
/// pivot_ratio_out, when non-null, receives max|pivot| / min|pivot| as a
/// cheap conditioning estimate.
Matrix<cplx> solve_linear(Matrix<cplx> a, Matrix<cplx> b,
                          double* pivot_ratio_out = nullptr);

}  // namespace netspec::linalg

#endif
