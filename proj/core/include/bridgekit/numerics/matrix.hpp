#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <initializer_list>
#include <string_view>
#include <vector>

namespace bridgekit {

/// Dense row-major float64 matrix. Rows are samples throughout the library.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Builds a matrix from nested initializer lists; rows must have equal length.
Matrix make_matrix(std::initializer_list<std::initializer_list<double>> rows);

/// Rejects NaN/Inf entries with a DataError naming `what`.
void require_finite(const Matrix& m, std::string_view what);

bool all_finite(const Matrix& m);

/// Copies the listed rows of `m` in order.
Matrix take_rows(const Matrix& m, const std::vector<int>& rows);

/// Rows normalized to unit L2 norm; rows with norm < 1e-12 become zero.
Matrix normalize_rows(const Matrix& m);

}  // namespace bridgekit
