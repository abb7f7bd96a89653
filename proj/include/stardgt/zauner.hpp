#pragma once

// Weil-representation unitaries of SL(2, Z_L) and eigenvectors of the
// Zauner unitary ("star windows").

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "stardgt/ringmod.hpp"

namespace stardgt::zauner {

using cd = std::complex<double>;

/// [[alpha, beta], [gamma, delta]] over Z_L with determinant 1.
struct SymplecticMatrix {
  std::int64_t L;
  std::int64_t alpha, beta, gamma, delta;

  /// Validates alpha*delta - beta*gamma = 1 (mod L).
  SymplecticMatrix(std::int64_t L, std::int64_t alpha, std::int64_t beta, std::int64_t gamma,
                   std::int64_t delta);

  SymplecticMatrix operator*(const SymplecticMatrix& o) const;
  bool is_identity() const;
  friend bool operator==(const SymplecticMatrix&, const SymplecticMatrix&) = default;
};

/// (0, L-1, 1, L-1), i.e. [[0, -1], [1, -1]].
SymplecticMatrix zauner_matrix(std::int64_t L);

/// Entries of U_G evaluated on demand, so U_G can be applied without storing it.
/// Entry (u, v) = e^{i theta} / sqrt(L) * tau^{beta^-1 (alpha v^2 - 2uv + delta u^2)},
/// tau = -e^{i pi / L}, exponent reduced mod 2L.
class WeilOperator {
 public:
  WeilOperator(const SymplecticMatrix& G, double theta = 0.0);

  std::int64_t dim() const { return L_; }
  double theta() const { return theta_; }

  cd entry(std::int64_t u, std::int64_t v) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Eigen::MatrixXcd dense() const;

 private:
  std::int64_t L_;
  std::int64_t two_L_;
  std::int64_t beta_inv_;
  std::int64_t alpha_, delta_;
  double theta_;
  Eigen::VectorXcd tau_pow_;  // scale * tau^k, k in [0, 2L)
};

/// Dense L x L Weil unitary. Memory is 16 L^2 bytes.
Eigen::MatrixXcd weil_unitary(const SymplecticMatrix& G, double theta = 0.0);

/// max |(U U^H - I)_ij|
double unitarity_defect(const Eigen::MatrixXcd& U);

struct CubePhase {
  cd gamma;
  double residual;  // max |U^3 - gamma I|
};

/// Scalar gamma with U^3 = gamma I. Throws NotOrderThree when no scalar fits
/// to within 1e-6.
CubePhase zauner_cube_phase(const Eigen::MatrixXcd& U);

enum class EigenMethod { projector, power_iteration };

const char* to_string(EigenMethod m);
EigenMethod eigen_method_from_string(const std::string& s);

struct StarWindowOptions {
  EigenMethod method = EigenMethod::projector;
  std::uint64_t seed = 1;
  double theta = 0.0;
  ringmod::AdmissibilityMode mode = ringmod::AdmissibilityMode::relaxed;
  int max_power_iterations = 100000;
};

struct StarWindow {
  Eigen::VectorXcd g;  // unit norm, largest-modulus entry real positive
  cd lambda;
  double residual;  // ||U g - lambda g||_2
};

/// Eigenvector of the Zauner unitary U_Z of dimension L, computed matrix-free.
/// Throws AdmissibilityError when L fails the configured admissibility mode
/// and ConvergenceError when power iteration does not reach residual 1e-8.
StarWindow star_window(std::int64_t L, const StarWindowOptions& opts = {});

/// Multiply by a unit scalar so the largest-modulus entry is real positive.
void canonicalize_phase(Eigen::VectorXcd& g);

// Window cache file: 8-byte magic, u32 version, u64 L, u64 seed, then L
// interleaved (re, im) float64 pairs. All little-endian.
inline constexpr char kWindowMagic[8] = {'S', 'T', 'A', 'R', 'W', 'I', 'N', '\0'};
inline constexpr std::uint32_t kWindowFormatVersion = 1;

void save_window(const std::filesystem::path& path, const Eigen::VectorXcd& g,
                 std::uint64_t seed);

struct LoadedWindow {
  Eigen::VectorXcd g;
  std::uint64_t seed;
};
LoadedWindow load_window(const std::filesystem::path& path);

/// File name for the cache entry of (L, method, seed, theta) inside dir.
std::filesystem::path cache_path(const std::filesystem::path& dir, std::int64_t L,
                                 const StarWindowOptions& opts);

/// star_window() backed by an on-disk cache in dir. The residual is recomputed
/// on load.
StarWindow cached_star_window(const std::filesystem::path& dir, std::int64_t L,
                              const StarWindowOptions& opts = {});

}  // namespace stardgt::zauner
