#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "rsp/bigint.hpp"

namespace rsp {

// Dense matrix with arbitrary-precision integer entries. Small sizes only
// (section dimensions), so no attention is paid to cache layout.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Int& at(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Int& at(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * cols_ + j];
  }

  Matrix mul(const Matrix& rhs) const;

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Int> a_;
};

// Exact determinant by fraction-free (Bareiss) elimination. det of the
// empty 0x0 matrix is 1.
Int det_bareiss(Matrix a);

// Determinant reduced mod a prime, by elimination over the field Z/p.
// Returns a value in 0..p-1.
Int det_mod_prime(Matrix a, const Int& p);

// Exact integer inverse; only valid when det(a) is 1 or -1, otherwise
// nullopt.
std::optional<Matrix> inverse_unimodular(const Matrix& a);

// Inverse mod m = p^e. Exists iff det(a) is nonzero mod p; entries are
// returned in 0..m-1.
std::optional<Matrix> inverse_mod_prime_power(const Matrix& a, const Int& p,
                                              const Int& m);

}  // namespace rsp
