#include "bridgekit/numerics/matrix.hpp"

#include <cmath>
#include <string>

#include "bridgekit/error.hpp"

namespace bridgekit {

Matrix make_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = n == 0 ? 0 : static_cast<Eigen::Index>(rows.begin()->size());
  Matrix m(n, d);
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != d) {
      throw ConfigError("make_matrix: ragged rows");
    }
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

void require_finite(const Matrix& m, std::string_view what) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (!std::isfinite(m(r, c))) {
        throw DataError(std::string(what) + ": non-finite value at row " + std::to_string(r) +
                        ", column " + std::to_string(c));
      }
    }
  }
}

Matrix take_rows(const Matrix& m, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

Matrix normalize_rows(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double n = out.row(r).norm();
    if (n < 1e-12) {
      out.row(r).setZero();
    } else {
      out.row(r) /= n;
    }
  }
  return out;
}

}  // namespace bridgekit
