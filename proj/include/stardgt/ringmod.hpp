#pragma once

// Residue arithmetic mod L and selection of ambient dimensions whose
// Zauner-unitary eigenvectors generate spark deficient Gabor frames.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace stardgt::ringmod {

/// An element of Z_L. The value is always kept in [0, modulus).
class Residue {
 public:
  Residue(std::int64_t value, std::int64_t modulus);

  std::int64_t value() const { return value_; }
  std::int64_t modulus() const { return modulus_; }

  friend bool operator==(const Residue&, const Residue&) = default;

  Residue operator+(const Residue& o) const;
  Residue operator-(const Residue& o) const;
  Residue operator*(const Residue& o) const;
  Residue operator-() const;

 private:
  std::int64_t value_;
  std::int64_t modulus_;
};

struct PrimePower {
  std::uint64_t prime;
  unsigned exponent;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Prime powers with strictly increasing primes.
struct Factorization {
  std::vector<PrimePower> prime_powers;

  std::uint64_t value() const;
  std::uint64_t largest_prime() const;
  bool square_free() const;
  std::string to_string() const;
  friend bool operator==(const Factorization&, const Factorization&) = default;
};

/// strict: L odd, 3 | L, L square-free.
/// relaxed: L odd, 3 | L, exponents not all even.
enum class AdmissibilityMode { strict, relaxed };

const char* to_string(AdmissibilityMode mode);
AdmissibilityMode admissibility_mode_from_string(const std::string& s);

struct Admissibility {
  bool admissible = false;
  std::vector<std::string> reasons;  // violated conditions, empty when admissible
};

struct DimensionCandidate {
  std::uint64_t L;
  Factorization factors;
  std::vector<std::uint64_t> divisors;  // proper divisors > 1, usable as a or b
};

std::int64_t gcd(std::int64_t a, std::int64_t b);

/// Inverse of beta in Z_L. Throws NotInvertible when gcd(beta, L) != 1.
Residue mod_inverse(const Residue& beta);

/// Trial division. Throws InputError for n < 2.
Factorization factorize(std::uint64_t n);

Admissibility check_admissible(std::uint64_t L, AdmissibilityMode mode);

inline bool is_admissible(std::uint64_t L, AdmissibilityMode mode) {
  return check_admissible(L, mode).admissible;
}

/// Divisors d of n with 1 < d < n, ascending.
std::vector<std::uint64_t> proper_divisors(std::uint64_t n);

/// The top_k largest admissible L <= T with all prime factors <= prime_cap,
/// sorted descending. Throws EmptyResult when nothing qualifies.
std::vector<DimensionCandidate> enumerate_dimensions(std::uint64_t T, AdmissibilityMode mode,
                                                     std::uint64_t prime_cap = 23,
                                                     std::size_t top_k = 20);

}  // namespace stardgt::ringmod
