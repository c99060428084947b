#pragma once

#include <Eigen/Dense>

namespace kconv {

using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Matrix exponential by scaling and squaring with diagonal Pade approximants
/// (degrees 3..13, Higham 2005 thresholds).
///
/// The argument is first shifted by c = max |a_jj|, which makes a generator
/// matrix entrywise nonnegative and halves its norm; the factor e^{-c/2^s} is
/// folded into the scaled approximant so it never underflows.
DenseMatrix expm(const DenseMatrix& a);

/// Number of squarings the last expm call on a matrix of this norm would use.
int expm_squarings(double one_norm);

/// A^n by binary powering; n = 0 gives the identity.
DenseMatrix matrix_power(const DenseMatrix& a, long long n);

}  // namespace kconv
