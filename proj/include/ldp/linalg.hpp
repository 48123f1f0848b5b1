#pragma once

// Small dense linear algebra for the handful of matrix routines needed:
// log-determinant of a symmetric positive definite matrix (Cholesky) and
// numerical rank (Householder QR with column pivoting).  Matrices are
// row-major contiguous doubles; sizes here are tiny (a <= 12 columns).

#include <span>
#include <vector>

namespace ldp {

/// log(det(A)) of the SPD matrix A (n x n, row-major).  A is destroyed.
/// Throws numeric_error if a pivot is not strictly positive.
double spd_log_det(std::span<double> a, int n);

/// Numerical rank of the rows x cols matrix (row-major copy taken by value).
/// A pivot counts while |R_ii| > rel_tol * |R_00|.
int qr_rank(std::vector<double> a, int rows, int cols, double rel_tol);

}  // namespace ldp
