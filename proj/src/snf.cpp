#include "ssgp/snf.hpp"

#include <utility>

namespace ssgp {

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ArgumentError("ragged matrix literal");
    for (long v : r) data_.emplace_back(v);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) throw ArgumentError("matrix shape mismatch");
  IntMatrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += a(i, k) * b(k, j);
    }
  return r;
}

std::vector<BigInt> operator*(const IntMatrix& a, const std::vector<BigInt>& y) {
  if (a.cols() != y.size()) throw ArgumentError("matrix/vector shape mismatch");
  std::vector<BigInt> r(a.rows(), BigInt(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r[i] += a(i, j) * y[j];
  return r;
}

namespace {

// Row and column operations applied to the working matrix, mirrored into the
// row transform (or right-hand side) and the column transform.
struct Reducer {
  IntMatrix a;
  IntMatrix* u = nullptr;            // optional row transform
  std::vector<BigInt>* rhs = nullptr;  // optional right-hand side
  IntMatrix v;

  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < a.cols(); ++c) std::swap(a(i, c), a(j, c));
    if (u)
      for (std::size_t c = 0; c < u->cols(); ++c) std::swap((*u)(i, c), (*u)(j, c));
    if (rhs) std::swap((*rhs)[i], (*rhs)[j]);
  }
  void swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < a.rows(); ++r) std::swap(a(r, i), a(r, j));
    for (std::size_t r = 0; r < v.rows(); ++r) std::swap(v(r, i), v(r, j));
  }
  // row_i -= q * row_j
  void sub_row(std::size_t i, std::size_t j, const BigInt& q) {
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (a(j, c) != 0) a(i, c) -= q * a(j, c);
    if (u)
      for (std::size_t c = 0; c < u->cols(); ++c)
        if ((*u)(j, c) != 0) (*u)(i, c) -= q * (*u)(j, c);
    if (rhs) (*rhs)[i] -= q * (*rhs)[j];
  }
  // col_i -= q * col_j
  void sub_col(std::size_t i, std::size_t j, const BigInt& q) {
    for (std::size_t r = 0; r < a.rows(); ++r)
      if (a(r, j) != 0) a(r, i) -= q * a(r, j);
    for (std::size_t r = 0; r < v.rows(); ++r)
      if (v(r, j) != 0) v(r, i) -= q * v(r, j);
  }
  void negate_row(std::size_t i) { sub_row(i, i, BigInt(2)); }

  // Diagonalizes a; returns the rank.
  std::size_t run(bool enforce_divisibility) {
    const std::size_t rows = a.rows(), cols = a.cols();
    std::size_t t = 0;
    for (; t < rows && t < cols; ++t) {
      for (;;) {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        bool found = false;
        std::size_t pr = t, pc = t;
        for (std::size_t r = t; r < rows; ++r)
          for (std::size_t c = t; c < cols; ++c)
            if (a(r, c) != 0 && (!found || mpz_cmpabs(a(r, c).get_mpz_t(), a(pr, pc).get_mpz_t()) < 0)) {
              found = true;
              pr = r;
              pc = c;
            }
        if (!found) return t;
        swap_rows(t, pr);
        swap_cols(t, pc);
        bool clean = true;
        for (std::size_t r = t + 1; r < rows; ++r) {
          if (a(r, t) == 0) continue;
          BigInt q;
          mpz_fdiv_q(q.get_mpz_t(), a(r, t).get_mpz_t(), a(t, t).get_mpz_t());
          sub_row(r, t, q);
          if (a(r, t) != 0) clean = false;
        }
        for (std::size_t c = t + 1; c < cols; ++c) {
          if (a(t, c) == 0) continue;
          BigInt q;
          mpz_fdiv_q(q.get_mpz_t(), a(t, c).get_mpz_t(), a(t, t).get_mpz_t());
          sub_col(c, t, q);
          if (a(t, c) != 0) clean = false;
        }
        if (!clean) continue;
        if (enforce_divisibility) {
          bool divides = true;
          for (std::size_t r = t + 1; r < rows && divides; ++r)
            for (std::size_t c = t + 1; c < cols; ++c)
              if (a(r, c) != 0 && !mpz_divisible_p(a(r, c).get_mpz_t(), a(t, t).get_mpz_t())) {
                // Pull the offending row into row t; the next pass shrinks the pivot.
                sub_row(t, r, BigInt(-1));
                divides = false;
                break;
              }
          if (!divides) continue;
        }
        if (a(t, t) < 0) negate_row(t);
        break;
      }
    }
    return t;
  }
};

}  // namespace

SmithForm smith_normal_form(const IntMatrix& a) {
  SmithForm out;
  out.u = IntMatrix::identity(a.rows());
  Reducer red{a, &out.u, nullptr, IntMatrix::identity(a.cols())};
  out.rank = red.run(true);
  out.d = std::move(red.a);
  out.v = std::move(red.v);
  return out;
}

std::optional<std::vector<BigInt>> snf_solve(const IntMatrix& a, const std::vector<BigInt>& c) {
  if (c.size() != a.rows()) throw ArgumentError("snf_solve: right-hand side has wrong length");
  std::vector<BigInt> rhs = c;
  Reducer red{a, nullptr, &rhs, IntMatrix::identity(a.cols())};
  const std::size_t rank = red.run(false);
  std::vector<BigInt> z(a.cols(), BigInt(0));
  for (std::size_t i = 0; i < rank; ++i) {
    if (!mpz_divisible_p(rhs[i].get_mpz_t(), red.a(i, i).get_mpz_t())) return std::nullopt;
    mpz_divexact(z[i].get_mpz_t(), rhs[i].get_mpz_t(), red.a(i, i).get_mpz_t());
  }
  for (std::size_t i = rank; i < rhs.size(); ++i)
    if (rhs[i] != 0) return std::nullopt;
  return red.v * z;
}

}  // namespace ssgp
