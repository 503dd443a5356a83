#include "ssgp/arith.hpp"

#include <algorithm>
#include <sstream>

namespace ssgp {

Rat::Rat(const BigInt& num, const BigInt& den) {
  if (den == 0) throw ArgumentError("zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rat Rat::parse(std::string_view text) {
  auto parse_int = [&](std::string_view s) {
    std::string t(s);
    const std::size_t start = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
    if (t.size() == start || !std::all_of(t.begin() + static_cast<long>(start), t.end(),
                                          [](char c) { return c >= '0' && c <= '9'; }))
      throw ArgumentError("malformed rational '" + std::string(text) + "'");
    if (t[0] == '+') t.erase(0, 1);
    return BigInt(t);
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rat(parse_int(text));
  return Rat(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

std::string Rat::str() const {
  if (is_integer()) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

Rat& Rat::operator/=(const Rat& o) {
  if (o.is_zero()) throw ArgumentError("division by zero");
  v_ /= o.v_;
  return *this;
}

QVec zero_qvec(std::size_t m) { return QVec(m, Rat(0)); }

QVec unit_qvec(std::size_t m, std::size_t i) {
  QVec v(m, Rat(0));
  v.at(i) = Rat(1);
  return v;
}

QVec operator+(const QVec& a, const QVec& b) {
  QVec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b.at(i);
  return r;
}

QVec operator-(const QVec& a, const QVec& b) {
  QVec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b.at(i);
  return r;
}

QVec operator-(const QVec& a) {
  QVec r(a);
  for (auto& c : r) c = -c;
  return r;
}

QVec operator*(const Rat& c, const QVec& a) {
  QVec r(a);
  for (auto& x : r) x *= c;
  return r;
}

bool is_zero(const QVec& a) {
  return std::all_of(a.begin(), a.end(), [](const Rat& r) { return r.is_zero(); });
}

bool is_integral(const QVec& a) {
  return std::all_of(a.begin(), a.end(), [](const Rat& r) { return r.is_integer(); });
}

std::string to_string(const QVec& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ',';
    s += a[i].str();
  }
  return s;
}

BigInt lcm(const BigInt& a, const BigInt& b) {
  BigInt r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

BigInt denominator_lcm(const QVec& a) {
  BigInt l = 1;
  for (const auto& r : a) l = lcm(l, r.den());
  return l;
}

bool is_prime(Prime n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (Prime d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

namespace {
constexpr unsigned long kTrialLimit = 10'000'000;
}

std::vector<Prime> prime_factors(const BigInt& n_in) {
  BigInt n = abs(n_in);
  std::vector<Prime> out;
  if (n == 0) throw ArgumentError("prime_factors of zero");
  for (unsigned long d = 2; n > 1; d += (d == 2 ? 1 : 2)) {
    if (BigInt(d) * d > n) {
      out.push_back(n.get_ui());
      break;
    }
    if (d > kTrialLimit) throw ArgumentError("integer too large to factor: " + n_in.get_str());
    if (mpz_divisible_ui_p(n.get_mpz_t(), d)) {
      out.push_back(d);
      while (mpz_divisible_ui_p(n.get_mpz_t(), d)) mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), d);
    }
  }
  return out;
}

PrimeSet::PrimeSet(std::vector<Prime> primes) : primes_(std::move(primes)) {
  std::sort(primes_.begin(), primes_.end());
  primes_.erase(std::unique(primes_.begin(), primes_.end()), primes_.end());
  for (Prime p : primes_)
    if (!is_prime(p)) throw ArgumentError("not a prime: " + std::to_string(p));
}

bool PrimeSet::contains(Prime p) const { return std::binary_search(primes_.begin(), primes_.end(), p); }

bool PrimeSet::subset_of(const PrimeSet& other) const {
  return std::includes(other.primes_.begin(), other.primes_.end(), primes_.begin(), primes_.end());
}

PrimeSet PrimeSet::united(const PrimeSet& other) const {
  std::vector<Prime> u;
  std::set_union(primes_.begin(), primes_.end(), other.primes_.begin(), other.primes_.end(),
                 std::back_inserter(u));
  PrimeSet r;
  r.primes_ = std::move(u);
  return r;
}

std::string PrimeSet::str() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < primes_.size(); ++i) os << (i ? "," : "") << primes_[i];
  os << '}';
  return os.str();
}

PrimeSet denominator_primes(const QVec& x) { return PrimeSet(prime_factors(denominator_lcm(x))); }

std::optional<long> valuation(Prime p, const Rat& q) {
  if (!is_prime(p)) throw ArgumentError("valuation at non-prime " + std::to_string(p));
  if (q.is_zero()) return std::nullopt;
  BigInt t;
  const BigInt bp(static_cast<unsigned long>(p));
  const long up = static_cast<long>(mpz_remove(t.get_mpz_t(), q.num().get_mpz_t(), bp.get_mpz_t()));
  const long down = static_cast<long>(mpz_remove(t.get_mpz_t(), q.den().get_mpz_t(), bp.get_mpz_t()));
  return up - down;
}

BigInt part_outside(const BigInt& n, const PrimeSet& pi) {
  BigInt r = abs(n);
  for (Prime p : pi.primes()) {
    const BigInt bp(static_cast<unsigned long>(p));
    mpz_remove(r.get_mpz_t(), r.get_mpz_t(), bp.get_mpz_t());
  }
  return r;
}

QpiMembership qpi_member(const QVec& x, const PrimeSet& pi) {
  QpiMembership r;
  r.integral = is_integral(x);
  if (pi.empty()) {
    r.in_q_pi = is_zero(x);
  } else {
    r.in_q_pi = std::all_of(x.begin(), x.end(), [&](const Rat& c) { return part_outside(c.den(), pi) == 1; });
  }
  return r;
}

bool qpi_contains(const QVec& x, const PrimeSet& pi) {
  const auto r = qpi_member(x, pi);
  return r.in_q_pi || r.integral;
}

Prime min_prime_outside(const PrimeSet& pi) {
  for (Prime p = 2;; ++p)
    if (is_prime(p) && !pi.contains(p)) return p;
}

}  // namespace ssgp
