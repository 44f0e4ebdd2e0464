#include "ttade/rational_matrix.hpp"

#include "ttade/common.hpp"

namespace ttade {

RationalMatrix::RationalMatrix(std::size_t n, const std::vector<long>& row_major) : RationalMatrix(n) {
  if (row_major.size() != n * n) throw Error(ErrorKind::BadInput, "matrix entry count mismatch");
  for (std::size_t k = 0; k < n * n; ++k) a_[k] = row_major[k];
}

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& b) const {
  if (n_ != b.n_) throw Error(ErrorKind::BadInput, "dimension mismatch");
  RationalMatrix c(n_);
  mpq_class t;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < n_; ++k) {
      const mpq_class& aik = (*this)(i, k);
      if (sgn(aik) == 0) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (sgn(b(k, j)) == 0) continue;
        t = aik * b(k, j);
        c(i, j) += t;
      }
    }
  return c;
}

RationalMatrix RationalMatrix::operator+(const RationalMatrix& b) const {
  if (n_ != b.n_) throw Error(ErrorKind::BadInput, "dimension mismatch");
  RationalMatrix c(n_);
  for (std::size_t k = 0; k < a_.size(); ++k) c.a_[k] = a_[k] + b.a_[k];
  return c;
}

RationalMatrix RationalMatrix::operator-(const RationalMatrix& b) const {
  if (n_ != b.n_) throw Error(ErrorKind::BadInput, "dimension mismatch");
  RationalMatrix c(n_);
  for (std::size_t k = 0; k < a_.size(); ++k) c.a_[k] = a_[k] - b.a_[k];
  return c;
}

bool RationalMatrix::operator==(const RationalMatrix& b) const { return n_ == b.n_ && a_ == b.a_; }

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool RationalMatrix::is_unitriangular() const {
  for (std::size_t i = 0; i < n_; ++i) {
    if ((*this)(i, i) != 1) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (sgn((*this)(i, j)) != 0) return false;
  }
  return true;
}

bool RationalMatrix::is_integer() const {
  for (const auto& q : a_)
    if (q.get_den() != 1) return false;
  return true;
}

mpq_class RationalMatrix::determinant() const {
  std::vector<mpq_class> m = a_;
  mpq_class det = 1;
  for (std::size_t c = 0; c < n_; ++c) {
    std::size_t p = c;
    while (p < n_ && sgn(m[p * n_ + c]) == 0) ++p;
    if (p == n_) return 0;
    if (p != c) {
      for (std::size_t j = 0; j < n_; ++j) std::swap(m[p * n_ + j], m[c * n_ + j]);
      det = -det;
    }
    const mpq_class piv = m[c * n_ + c];
    det *= piv;
    for (std::size_t r = c + 1; r < n_; ++r) {
      if (sgn(m[r * n_ + c]) == 0) continue;
      const mpq_class f = m[r * n_ + c] / piv;
      for (std::size_t j = c; j < n_; ++j) m[r * n_ + j] -= f * m[c * n_ + j];
    }
  }
  return det;
}

RationalMatrix RationalMatrix::inverse() const {
  std::vector<mpq_class> m = a_;
  RationalMatrix inv = identity(n_);
  for (std::size_t c = 0; c < n_; ++c) {
    std::size_t p = c;
    while (p < n_ && sgn(m[p * n_ + c]) == 0) ++p;
    if (p == n_) throw Error(ErrorKind::BadInput, "singular matrix");
    if (p != c)
      for (std::size_t j = 0; j < n_; ++j) {
        std::swap(m[p * n_ + j], m[c * n_ + j]);
        std::swap(inv(p, j), inv(c, j));
      }
    const mpq_class piv = m[c * n_ + c];
    for (std::size_t j = 0; j < n_; ++j) {
      m[c * n_ + j] /= piv;
      inv(c, j) /= piv;
    }
    for (std::size_t r = 0; r < n_; ++r) {
      if (r == c || sgn(m[r * n_ + c]) == 0) continue;
      const mpq_class f = m[r * n_ + c];
      for (std::size_t j = 0; j < n_; ++j) {
        m[r * n_ + j] -= f * m[c * n_ + j];
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

mpq_class RationalMatrix::trace() const {
  mpq_class t = 0;
  for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

// Faddeev-LeVerrier.
std::vector<mpq_class> RationalMatrix::charpoly() const {
  std::vector<mpq_class> c(n_ + 1);
  c[n_] = 1;
  RationalMatrix mk(n_);
  for (std::size_t k = 1; k <= n_; ++k) {
    RationalMatrix t = *this * mk;
    for (std::size_t i = 0; i < n_; ++i) t(i, i) += c[n_ - k + 1];
    mk = t;
    c[n_ - k] = -(*this * mk).trace() / mpq_class(static_cast<long>(k));
  }
  return c;
}

std::string RationalMatrix::key() const {
  std::string s = std::to_string(n_) + ":";
  for (const auto& q : a_) {
    s += q.get_str();
    s += ',';
  }
  return s;
}

Eigen::MatrixXd RationalMatrix::to_double() const {
  Eigen::MatrixXd m(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j).get_d();
  return m;
}

std::string to_string(const RationalMatrix& m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.n(); ++i) {
    s += i ? ",[" : "[";
    for (std::size_t j = 0; j < m.n(); ++j) {
      if (j) s += ",";
      s += m(i, j).get_str();
    }
    s += "]";
  }
  return s + "]";
}

}  // namespace ttade
