#include "pulsesync/linalg.hpp"

#include <lapacke.h>

#include "pulsesync/errors.hpp"

namespace pulsesync::linalg {

LuFactorization::LuFactorization(Eigen::MatrixXd a) : lu_(std::move(a)) {
  if (lu_.rows() != lu_.cols()) throw ValidationError("LU needs a square matrix");
  const lapack_int n = static_cast<lapack_int>(lu_.rows());
  const double anorm = lu_.cwiseAbs().colwise().sum().maxCoeff();
  pivots_.resize(n);
  const lapack_int info =
      LAPACKE_dgetrf(LAPACK_COL_MAJOR, n, n, lu_.data(), n, pivots_.data());
  if (info < 0) throw NumericalError("dgetrf: invalid argument");
  singular_ = info > 0;
  if (!singular_) {
    double rc = 0.0;
    if (LAPACKE_dgecon(LAPACK_COL_MAJOR, '1', n, lu_.data(), n, anorm, &rc) == 0) rcond_ = rc;
  }
}

Eigen::VectorXd LuFactorization::solve(const Eigen::VectorXd& b, bool transpose) const {
  if (singular_) throw NumericalError("solve with a singular LU factorisation");
  Eigen::VectorXd x = b;
  const lapack_int n = static_cast<lapack_int>(lu_.rows());
  const lapack_int info = LAPACKE_dgetrs(LAPACK_COL_MAJOR, transpose ? 'T' : 'N', n, 1,
                                         lu_.data(), n, pivots_.data(), x.data(), n);
  if (info != 0) throw NumericalError("dgetrs failed");
  return x;
}

std::vector<std::complex<double>> eigenvalues(Eigen::MatrixXd a) {
  if (a.rows() != a.cols()) throw ValidationError("eigenvalues need a square matrix");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  std::vector<double> wr(n), wi(n);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, wr.data(),
                                        wi.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw NumericalError("dgeev did not converge");
  std::vector<std::complex<double>> out(n);
  for (lapack_int i = 0; i < n; ++i) out[i] = {wr[i], wi[i]};
  return out;
}

Svd svd(Eigen::MatrixXd a) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  Svd out;
  out.values.resize(std::min(m, n));
  out.u.resize(m, m);
  out.vt.resize(n, n);
  const lapack_int info =
      LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'A', m, n, a.data(), m, out.values.data(), out.u.data(), m,
                     out.vt.data(), n);
  if (info != 0) throw NumericalError("dgesdd did not converge");
  return out;
}

Eigen::VectorXd singular_values(Eigen::MatrixXd a) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  Eigen::VectorXd values(std::min(m, n));
  const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, a.data(), m,
                                         values.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw NumericalError("dgesdd did not converge");
  return values;
}

}  // namespace pulsesync::linalg
