#pragma once

// Thin LAPACK wrappers for the dense problems that dominate the pulse
// computations (bordered Newton systems, linearisation spectra, nullspaces).

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace pulsesync::linalg {

/// LU factorisation with partial pivoting (dgetrf), reusable for many solves.
class LuFactorization {
 public:
  explicit LuFactorization(Eigen::MatrixXd a);

  bool singular() const noexcept { return singular_; }
  /// Reciprocal condition number estimate in the 1-norm.
  double rcond() const noexcept { return rcond_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& b, bool transpose = false) const;

 private:
  Eigen::MatrixXd lu_;
  std::vector<int> pivots_;
  bool singular_ = false;
  double rcond_ = 0.0;
};

/// Eigenvalues of a general real matrix (dgeev, no vectors).
std::vector<std::complex<double>> eigenvalues(Eigen::MatrixXd a);

struct Svd {
  Eigen::VectorXd values;  // descending
  Eigen::MatrixXd u;
  Eigen::MatrixXd vt;
};

/// Full singular value decomposition (dgesdd).
Svd svd(Eigen::MatrixXd a);

/// Singular values only, descending.
Eigen::VectorXd singular_values(Eigen::MatrixXd a);

}  // namespace pulsesync::linalg
