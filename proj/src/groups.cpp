#include "ssgp/groups.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace ssgp {

namespace {

std::int64_t mod_floor(std::int64_t a, std::int64_t d) {
  const std::int64_t r = a % d;
  return r < 0 ? r + d : r;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? text.size() - start : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Odometer step; false once every combination has been visited.
bool advance(std::vector<std::size_t>& idx, const std::vector<std::size_t>& sizes) {
  for (std::size_t pos = idx.size(); pos-- > 0;) {
    if (++idx[pos] < sizes[pos]) return true;
    idx[pos] = 0;
  }
  return false;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::int64_t parse_int64(const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw ArgumentError("malformed integer '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ArgumentError("malformed integer '" + s + "'");
  }
}

}  // namespace

void HSpec::validate() const {
  for (auto d : torsion)
    if (d < 2) throw ArgumentError("torsion order " + std::to_string(d) + " is below 2");
}

KSpace::KSpace(std::size_t m, HSpec h) : m_(m), h_(std::move(h)) {
  if (m_ == 0) throw ArgumentError("m must be positive");
  h_.validate();
}

KElem KSpace::zero() const {
  return KElem{zero_qvec(m_), HElem{std::vector<std::int64_t>(h_.free_rank, 0),
                                    std::vector<std::int64_t>(h_.torsion.size(), 0)}};
}

KElem KSpace::from_q(QVec q) const {
  KElem e = zero();
  if (q.size() != m_) throw ArgumentError("q-part has wrong length");
  e.q = std::move(q);
  return e;
}

KElem KSpace::make(QVec q, std::vector<std::int64_t> free, std::vector<std::int64_t> torsion) const {
  KElem e{std::move(q), HElem{std::move(free), std::move(torsion)}};
  check_shape(e);
  reduce(e.h);
  return e;
}

void KSpace::check_shape(const KElem& a) const {
  if (a.q.size() != m_ || a.h.free.size() != h_.free_rank || a.h.torsion.size() != h_.torsion.size())
    throw ArgumentError("element does not match the instance shape");
}

void KSpace::reduce(HElem& h) const {
  for (std::size_t j = 0; j < h.torsion.size(); ++j) h.torsion[j] = mod_floor(h.torsion[j], h_.torsion[j]);
}

KElem KSpace::add(const KElem& a, const KElem& b) const {
  KElem r = a;
  for (std::size_t i = 0; i < m_; ++i) r.q[i] += b.q[i];
  for (std::size_t i = 0; i < h_.free_rank; ++i) r.h.free[i] += b.h.free[i];
  for (std::size_t j = 0; j < h_.torsion.size(); ++j) r.h.torsion[j] += b.h.torsion[j];
  reduce(r.h);
  return r;
}

KElem KSpace::neg(const KElem& a) const { return scale(-1, a); }

KElem KSpace::sub(const KElem& a, const KElem& b) const { return add(a, neg(b)); }

KElem KSpace::scale(std::int64_t c, const KElem& a) const {
  KElem r = a;
  const Rat rc(static_cast<long>(c));
  for (auto& x : r.q) x *= rc;
  for (auto& x : r.h.free) x *= c;
  for (std::size_t j = 0; j < r.h.torsion.size(); ++j)
    r.h.torsion[j] = mod_floor(mod_floor(c, h_.torsion[j]) * r.h.torsion[j], h_.torsion[j]);
  return r;
}

bool KSpace::h_is_zero(const HElem& h) const {
  return std::all_of(h.free.begin(), h.free.end(), [](auto v) { return v == 0; }) &&
         std::all_of(h.torsion.begin(), h.torsion.end(), [](auto v) { return v == 0; });
}

bool KSpace::is_zero(const KElem& a) const { return ssgp::is_zero(a.q) && h_is_zero(a.h); }

BigInt KSpace::height(const KElem& a) const {
  BigInt h = 0;
  for (const auto& x : a.q) {
    h = std::max(h, BigInt(abs(x.num())));
    h = std::max(h, x.den());
  }
  for (auto v : a.h.free) h = std::max(h, BigInt(static_cast<long>(v < 0 ? -v : v)));
  for (auto v : a.h.torsion) h = std::max(h, BigInt(static_cast<long>(v)));
  return h;
}

KElem KSpace::parse(std::string_view text) const {
  const auto halves = split(text, ';');
  if (halves.size() > 2) throw ArgumentError("element literal has more than one ';'");
  QVec q;
  for (const auto& part : split(halves[0], ',')) q.push_back(Rat::parse(trim(part)));
  std::vector<std::int64_t> hv;
  if (halves.size() == 2 && !trim(halves[1]).empty())
    for (const auto& part : split(halves[1], ',')) hv.push_back(parse_int64(trim(part)));
  const std::size_t hn = h_.free_rank + h_.torsion.size();
  if (q.size() != m_) throw ArgumentError("element literal needs " + std::to_string(m_) + " q-coordinates");
  if (hv.size() != hn) throw ArgumentError("element literal needs " + std::to_string(hn) + " h-coordinates");
  std::vector<std::int64_t> free(hv.begin(), hv.begin() + static_cast<long>(h_.free_rank));
  std::vector<std::int64_t> tors(hv.begin() + static_cast<long>(h_.free_rank), hv.end());
  return make(std::move(q), std::move(free), std::move(tors));
}

std::string KSpace::str(const KElem& a) const {
  std::ostringstream os;
  for (std::size_t i = 0; i < a.q.size(); ++i) os << (i ? "," : "") << a.q[i];
  if (!h_.trivial()) {
    os << ';';
    bool first = true;
    for (auto v : a.h.free) os << (std::exchange(first, false) ? "" : ",") << v;
    for (auto v : a.h.torsion) os << (std::exchange(first, false) ? "" : ",") << v;
  }
  return os.str();
}

WideGroup WideGroup::full_q(std::size_t m) {
  if (m == 0) throw ArgumentError("m must be positive");
  WideGroup g;
  g.m_ = m;
  return g;
}

WideGroup WideGroup::localized(std::size_t m, std::int64_t residue, std::int64_t modulus) {
  if (m == 0) throw ArgumentError("m must be positive");
  if (modulus < 1) throw ArgumentError("residue class modulus must be positive");
  WideGroup g;
  g.m_ = m;
  g.kind_ = Kind::Localized;
  g.modulus_ = modulus;
  g.residue_ = mod_floor(residue, modulus);
  if (std::gcd(g.residue_, modulus) != 1)
    throw ArgumentError("residue class " + std::to_string(residue) + " mod " + std::to_string(modulus) +
                        " holds at most one prime");
  int count = 0;
  for (Prime p = 2; p < 10000 && count < 5; ++p)
    if (is_prime(p) && g.admits_prime(p)) ++count;
  if (count < 5) throw ArgumentError("residue class holds fewer than five primes below 10^4");
  return g;
}

bool WideGroup::admits_prime(Prime p) const {
  if (kind_ == Kind::FullQ) return true;
  return static_cast<std::int64_t>(p % static_cast<Prime>(modulus_)) == residue_;
}

bool WideGroup::contains(const QVec& x) const {
  if (x.size() != m_) return false;
  if (kind_ == Kind::FullQ) return true;
  const auto primes = prime_factors(denominator_lcm(x));
  return std::all_of(primes.begin(), primes.end(), [&](Prime p) { return admits_prime(p); });
}

QVec WideGroup::witness(const PrimeSet& pi) const {
  constexpr Prime kSearchLimit = 10'000'000;
  for (Prime p = 2; p < kSearchLimit; ++p) {
    if (!is_prime(p) || pi.contains(p) || !admits_prime(p)) continue;
    QVec w = zero_qvec(m_);
    w[0] = Rat(BigInt(1), BigInt(static_cast<unsigned long>(p)));
    return w;
  }
  throw ConstructionError("no admitted prime outside " + pi.str() + " below the search limit");
}

std::string WideGroup::describe() const {
  if (kind_ == Kind::FullQ) return "Q^" + std::to_string(m_);
  return "Q^" + std::to_string(m_) + " localized at primes " + std::to_string(residue_) + " mod " +
         std::to_string(modulus_);
}

std::vector<KElem> enumerate_prefix(const Instance& inst, std::size_t count) {
  const KSpace ks = inst.space();
  std::vector<KElem> out;
  if (count == 0) return out;
  out.push_back(ks.zero());
  const std::size_t m = ks.m();
  const std::size_t a = ks.h().free_rank;
  const std::size_t b = ks.h().torsion.size();

  for (long h = 1; out.size() < count; ++h) {
    std::vector<Rat> rats;
    for (long den = 1; den <= h; ++den)
      for (long num = -h; num <= h; ++num)
        if (std::gcd(num, den) == 1 || (num == 0 && den == 1)) rats.emplace_back(BigInt(num), BigInt(den));
    std::sort(rats.begin(), rats.end());
    // One option list per coordinate, in the KElem comparison order.
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0; i < m; ++i) sizes.push_back(rats.size());
    for (std::size_t i = 0; i < a; ++i) sizes.push_back(static_cast<std::size_t>(2 * h + 1));
    for (std::size_t j = 0; j < b; ++j)
      sizes.push_back(static_cast<std::size_t>(std::min<std::int64_t>(h, ks.h().torsion[j] - 1) + 1));

    std::vector<KElem> level;
    std::vector<std::size_t> idx(sizes.size(), 0);
    do {
      KElem e = ks.zero();
      for (std::size_t i = 0; i < m; ++i) e.q[i] = rats[idx[i]];
      for (std::size_t i = 0; i < a; ++i) e.h.free[i] = static_cast<std::int64_t>(idx[m + i]) - h;
      for (std::size_t j = 0; j < b; ++j) e.h.torsion[j] = static_cast<std::int64_t>(idx[m + a + j]);
      if (ks.height(e) == h && !ks.is_zero(e) && inst.g.contains(e.q)) level.push_back(std::move(e));
    } while (advance(idx, sizes));
    std::sort(level.begin(), level.end());
    for (auto& e : level) {
      if (out.size() == count) break;
      out.push_back(std::move(e));
    }
  }
  return out;
}

KElem enumerate_k(const Instance& inst, std::size_t i) { return enumerate_prefix(inst, i + 1).back(); }

QVec cyclic_cap_ambient(const QVec& g, const PrimeSet& pi) {
  BigInt d = 1;
  for (const auto& x : g) d = lcm(d, part_outside(x.den(), pi));
  return Rat(d) * g;
}

QVec cyclic_cap_qpi(const QVec& g, const PrimeSet& pi) {
  if (pi.empty()) return zero_qvec(g.size());
  return cyclic_cap_ambient(g, pi);
}

namespace {

bool in_lattice(const QVec& v, std::int64_t s) {
  const BigInt bs(static_cast<long>(s));
  return std::all_of(v.begin(), v.end(), [&](const Rat& x) {
    return x.is_integer() && mpz_divisible_p(x.num().get_mpz_t(), bs.get_mpz_t());
  });
}

}  // namespace

QVec find_g(const WideGroup& group, const PrimeSet& pi, std::int64_t k, std::int64_t s) {
  if (k < 1) throw ArgumentError("find_g: k must be positive");
  if (s == 0) throw ArgumentError("find_g: s must be nonzero");
  const std::int64_t bound = std::max<std::int64_t>(k, s < 0 ? -s : s);
  std::vector<Prime> small;
  for (Prime p = 2; p <= static_cast<Prime>(bound); ++p)
    if (is_prime(p)) small.push_back(p);
  const PrimeSet pi_ext = pi.united(PrimeSet(small));

  const QVec h = group.witness(pi_ext);
  if (!group.contains(h) || qpi_member(h, pi_ext).in_q_pi)
    throw ConstructionError("witness oracle returned an element inside Q_pi");

  Prime p = 0;
  for (const auto& x : h) {
    for (Prime q : prime_factors(x.den()))
      if (!pi_ext.contains(q)) {
        p = q;
        break;
      }
    if (p) break;
  }
  if (!p) throw ConstructionError("witness has no denominator prime outside pi'");

  const BigInt bp(static_cast<unsigned long>(p));
  BigInt m0(static_cast<long>(s));
  for (const auto& x : h) {
    BigInt c;
    mpz_remove(c.get_mpz_t(), x.den().get_mpz_t(), bp.get_mpz_t());
    m0 *= c;
  }
  const QVec g = Rat(m0) * h;

  if (!group.contains(g)) throw ConstructionError("find_g left G");
  if (!in_lattice(cyclic_cap_qpi(g, pi), s) || !in_lattice(cyclic_cap_ambient(g, pi), s))
    throw ConstructionError("find_g: <g> meets Q_pi outside sZ^m");
  for (std::int64_t l = 1; l <= k; ++l) {
    const QVec lg = Rat(static_cast<long>(l)) * g;
    if (qpi_member(lg, pi).in_q_pi || qpi_contains(lg, pi))
      throw ConstructionError("find_g: a small multiple of g lies in Q_pi");
  }
  return g;
}

GSequence find_g_sequence(const WideGroup& group, const PrimeSet& pi0, std::int64_t k, std::int64_t s) {
  GSequence seq;
  seq.pis.push_back(pi0);
  for (std::int64_t j = 1; j <= k; ++j) {
    const PrimeSet& prev = seq.pis.back();
    QVec g = find_g(group, prev, k, s);
    PrimeSet next = prev.united(denominator_primes(g));
    if (!qpi_member(g, next).in_q_pi) throw ConstructionError("find_g_sequence: g_j outside Q_{pi_j}");
    seq.gs.push_back(std::move(g));
    seq.pis.push_back(std::move(next));
  }
  return seq;
}

}  // namespace ssgp
