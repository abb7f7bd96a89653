#pragma once

// Seeded additive noise: white Gaussian, and pink / blue noise obtained by
// spectrally shaping white Gaussian noise.

#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace stardgt::noise {

enum class NoiseKind { gaussian, pink, blue };

const char* to_string(NoiseKind k);
NoiseKind noise_kind_from_string(const std::string& s);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::gaussian;
  double sigma = 0.0;  // std of the Gaussian; std scale factor of pink/blue
  std::uint64_t seed = 0;
};

/// Name of the generator recorded in report metadata.
const char* rng_name();

/// gaussian: i.i.d. N(0, sigma^2), drawn as sigma * z.
/// pink/blue: white complex Gaussian bins 1..L/2 scaled by f^{-1/2} / f^{1/2},
/// DC zero, Nyquist real, Hermitian-symmetric inverse FFT, de-meaned,
/// normalized to unit sample std, times sigma.
Eigen::VectorXd gen_noise(const NoiseSpec& spec, Eigen::Index L);

/// 100 evenly spaced values from 0.001 to 0.01.
Eigen::VectorXd sigma_sweep();

/// Unbiased (N - 1) sample standard deviation.
double sample_std(const Eigen::VectorXd& v);

}  // namespace stardgt::noise
