#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ttade {

// Dense square matrix over Q.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  explicit RationalMatrix(std::size_t n) : n_(n), a_(n * n, mpq_class(0)) {}
  RationalMatrix(std::size_t n, const std::vector<long>& row_major);

  static RationalMatrix identity(std::size_t n);

  std::size_t n() const { return n_; }
  mpq_class& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const mpq_class& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  RationalMatrix operator*(const RationalMatrix& b) const;
  RationalMatrix operator+(const RationalMatrix& b) const;
  RationalMatrix operator-(const RationalMatrix& b) const;
  bool operator==(const RationalMatrix& b) const;
  bool operator!=(const RationalMatrix& b) const { return !(*this == b); }

  RationalMatrix transpose() const;
  bool is_unitriangular() const;
  bool is_integer() const;
  mpq_class determinant() const;
  RationalMatrix inverse() const;  // throws on singular input
  mpq_class trace() const;

  // Coefficients c_0..c_n of det(lambda I - A), c_n = 1.
  std::vector<mpq_class> charpoly() const;

  std::string key() const;  // canonical text form, used for hashing
  Eigen::MatrixXd to_double() const;

 private:
  std::size_t n_ = 0;
  std::vector<mpq_class> a_;
};

std::string to_string(const RationalMatrix& m);

}  // namespace ttade
