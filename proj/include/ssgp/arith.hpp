#pragma once

// Exact rationals, prime utilities, p-adic valuations and the localized
// subgroups Q_pi of Q^m.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ssgp {

using BigInt = mpz_class;
using Prime = std::uint64_t;

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Always-reduced rational with positive denominator; zero is 0/1.
class Rat {
 public:
  Rat() = default;
  Rat(long v) : v_(v) {}  // NOLINT(google-explicit-constructor)
  Rat(const BigInt& n) : v_(n) {}  // NOLINT(google-explicit-constructor)
  Rat(const BigInt& num, const BigInt& den);

  /// Parses "a", "-a" or "a/b"; throws ArgumentError on malformed input or b = 0.
  static Rat parse(std::string_view text);

  const BigInt& num() const { return v_.get_num(); }
  const BigInt& den() const { return v_.get_den(); }
  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }
  std::string str() const;

  Rat operator-() const { return Rat(mpq_class(-v_)); }
  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o);

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }
  friend bool operator==(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) == 0; }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    const int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

 private:
  explicit Rat(mpq_class v) : v_(std::move(v)) {}
  mpq_class v_;
};

/// Element of Q^m.
using QVec = std::vector<Rat>;

QVec zero_qvec(std::size_t m);
QVec unit_qvec(std::size_t m, std::size_t i);
QVec operator+(const QVec& a, const QVec& b);
QVec operator-(const QVec& a, const QVec& b);
QVec operator-(const QVec& a);
QVec operator*(const Rat& c, const QVec& a);
bool is_zero(const QVec& a);
bool is_integral(const QVec& a);
std::string to_string(const QVec& a);

BigInt lcm(const BigInt& a, const BigInt& b);
/// lcm of all coordinate denominators (1 for the empty vector).
BigInt denominator_lcm(const QVec& a);

bool is_prime(Prime n);
/// Distinct prime divisors of |n| in ascending order. Trial division;
/// throws ArgumentError when |n| has a cofactor too large to certify.
std::vector<Prime> prime_factors(const BigInt& n);

/// Finite, strictly ascending set of primes.
class PrimeSet {
 public:
  PrimeSet() = default;
  /// Sorts and deduplicates; throws ArgumentError on a non-prime entry.
  explicit PrimeSet(std::vector<Prime> primes);
  PrimeSet(std::initializer_list<Prime> primes) : PrimeSet(std::vector<Prime>(primes)) {}

  const std::vector<Prime>& primes() const { return primes_; }
  bool empty() const { return primes_.empty(); }
  std::size_t size() const { return primes_.size(); }
  bool contains(Prime p) const;
  bool subset_of(const PrimeSet& other) const;
  PrimeSet united(const PrimeSet& other) const;
  std::string str() const;

  friend bool operator==(const PrimeSet&, const PrimeSet&) = default;

 private:
  std::vector<Prime> primes_;
};

/// Prime divisors of all coordinate denominators.
PrimeSet denominator_primes(const QVec& x);

/// p-adic valuation; std::nullopt stands for +infinity (q = 0).
std::optional<long> valuation(Prime p, const Rat& q);

/// Largest divisor of n (n > 0) whose prime factors all lie outside pi.
BigInt part_outside(const BigInt& n, const PrimeSet& pi);

struct QpiMembership {
  bool integral = false;  ///< x in Z^m
  bool in_q_pi = false;   ///< x in Q^m_pi, with Q_emptyset = {0}
};

QpiMembership qpi_member(const QVec& x, const PrimeSet& pi);

/// x in Q^m_pi + Z^m. Equals Q^m_pi membership for non-empty pi; for the empty
/// set it is integrality, the reading under which Z^m is contained in every Q_pi.
bool qpi_contains(const QVec& x, const PrimeSet& pi);

Prime min_prime_outside(const PrimeSet& pi);

}  // namespace ssgp
