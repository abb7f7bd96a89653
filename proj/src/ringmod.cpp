#include "stardgt/ringmod.hpp"

#include <algorithm>
#include <sstream>

#include "stardgt/error.hpp"

namespace stardgt::ringmod {

namespace {

std::int64_t reduce(std::int64_t v, std::int64_t m) {
  std::int64_t r = v % m;
  return r < 0 ? r + m : r;
}

void require_same_modulus(const Residue& a, const Residue& b) {
  if (a.modulus() != b.modulus()) throw InputError("residues with different moduli");
}

}  // namespace

Residue::Residue(std::int64_t value, std::int64_t modulus) : modulus_(modulus) {
  if (modulus < 1) throw InputError("modulus must be positive");
  value_ = reduce(value, modulus);
}

Residue Residue::operator+(const Residue& o) const {
  require_same_modulus(*this, o);
  return {value_ + o.value_, modulus_};
}

Residue Residue::operator-(const Residue& o) const {
  require_same_modulus(*this, o);
  return {value_ - o.value_, modulus_};
}

Residue Residue::operator*(const Residue& o) const {
  require_same_modulus(*this, o);
  return {static_cast<std::int64_t>((static_cast<__int128>(value_) * o.value_) % modulus_),
          modulus_};
}

Residue Residue::operator-() const { return {-value_, modulus_}; }

std::uint64_t Factorization::value() const {
  std::uint64_t v = 1;
  for (const auto& pp : prime_powers)
    for (unsigned i = 0; i < pp.exponent; ++i) v *= pp.prime;
  return v;
}

std::uint64_t Factorization::largest_prime() const {
  return prime_powers.empty() ? 1 : prime_powers.back().prime;
}

bool Factorization::square_free() const {
  return std::all_of(prime_powers.begin(), prime_powers.end(),
                     [](const PrimePower& pp) { return pp.exponent == 1; });
}

std::string Factorization::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < prime_powers.size(); ++i) {
    if (i) os << '*';
    os << prime_powers[i].prime;
    if (prime_powers[i].exponent > 1) os << '^' << prime_powers[i].exponent;
  }
  return os.str();
}

const char* to_string(AdmissibilityMode mode) {
  return mode == AdmissibilityMode::strict ? "strict" : "relaxed";
}

AdmissibilityMode admissibility_mode_from_string(const std::string& s) {
  if (s == "strict") return AdmissibilityMode::strict;
  if (s == "relaxed") return AdmissibilityMode::relaxed;
  throw InputError("unknown admissibility mode '" + s + "'");
}

std::int64_t gcd(std::int64_t a, std::int64_t b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b != 0) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Residue mod_inverse(const Residue& beta) {
  const std::int64_t m = beta.modulus();
  if (m == 1) return {0, 1};
  // extended Euclid on (beta, m)
  std::int64_t r0 = beta.value(), r1 = m;
  std::int64_t s0 = 1, s1 = 0;
  while (r1 != 0) {
    const std::int64_t q = r0 / r1;
    std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
    std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
  }
  if (r0 != 1) {
    throw NotInvertible(std::to_string(beta.value()) + " is not invertible mod " +
                        std::to_string(m));
  }
  return {s0, m};
}

Factorization factorize(std::uint64_t n) {
  if (n < 2) throw InputError("factorize requires n >= 2");
  Factorization f;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) f.prime_powers.push_back({p, e});
  }
  if (n > 1) f.prime_powers.push_back({n, 1});
  return f;
}

Admissibility check_admissible(std::uint64_t L, AdmissibilityMode mode) {
  Admissibility out;
  if (L < 3) {
    out.reasons.emplace_back("L < 3");
    return out;
  }
  if (L % 2 == 0) out.reasons.emplace_back("even");
  if (L % 3 != 0) out.reasons.emplace_back("not divisible by 3");
  const Factorization f = factorize(L);
  if (mode == AdmissibilityMode::strict) {
    if (!f.square_free()) out.reasons.emplace_back("not square-free");
  } else {
    const bool all_even = std::all_of(f.prime_powers.begin(), f.prime_powers.end(),
                                      [](const PrimePower& pp) { return pp.exponent % 2 == 0; });
    if (all_even) out.reasons.emplace_back("all prime exponents even");
  }
  out.admissible = out.reasons.empty();
  return out;
}

std::vector<std::uint64_t> proper_divisors(std::uint64_t n) {
  std::vector<std::uint64_t> small, large;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    small.push_back(d);
    if (d * d != n) large.push_back(n / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

std::vector<DimensionCandidate> enumerate_dimensions(std::uint64_t T, AdmissibilityMode mode,
                                                     std::uint64_t prime_cap,
                                                     std::size_t top_k) {
  if (T < 3) throw InputError("enumerate_dimensions requires T >= 3");
  std::vector<DimensionCandidate> out;
  // admissible L are odd multiples of 3, i.e. L = 3 (mod 6)
  std::uint64_t L = T - (T + 3) % 6;
  for (; out.size() < top_k; L -= 6) {
    Factorization f = factorize(L);
    if (f.largest_prime() <= prime_cap && is_admissible(L, mode))
      out.push_back({L, std::move(f), proper_divisors(L)});
    if (L < 9) break;
  }
  if (out.empty()) {
    throw EmptyResult("no " + std::string(to_string(mode)) + "-admissible dimension <= " +
                      std::to_string(T) + " with prime factors <= " +
                      std::to_string(prime_cap));
  }
  return out;
}

}  // namespace stardgt::ringmod
