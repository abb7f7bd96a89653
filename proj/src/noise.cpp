#include "stardgt/noise.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "stardgt/error.hpp"
#include "stardgt/random.hpp"

namespace stardgt::noise {

const char* to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::pink: return "pink";
    case NoiseKind::blue: return "blue";
  }
  return "?";
}

NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "gaussian" || s == "gauss" || s == "white") return NoiseKind::gaussian;
  if (s == "pink") return NoiseKind::pink;
  if (s == "blue") return NoiseKind::blue;
  throw InputError("unknown noise kind '" + s + "'");
}

const char* rng_name() { return GaussianStream::kName; }

double sample_std(const Eigen::VectorXd& v) {
  if (v.size() < 2) return 0.0;
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1));
}

namespace {

Eigen::VectorXd shaped(NoiseKind kind, Eigen::Index L, std::uint64_t seed) {
  GaussianStream rng(seed);
  const Eigen::Index half = L / 2;
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(L), 0.0);
  for (Eigen::Index f = 1; f <= half; ++f) {
    const double fd = static_cast<double>(f);
    const double gain = kind == NoiseKind::pink ? 1.0 / std::sqrt(fd) : std::sqrt(fd);
    const double re = rng();
    const double im = rng();
    std::complex<double> z(re, im);
    if (L % 2 == 0 && f == half) z = {re, 0.0};
    spec[static_cast<std::size_t>(f)] = gain * z;
    if (f != L - f) spec[static_cast<std::size_t>(L - f)] = std::conj(gain * z);
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> time;
  fft.inv(time, spec);
  Eigen::VectorXd out(L);
  for (Eigen::Index i = 0; i < L; ++i) out[i] = time[static_cast<std::size_t>(i)].real();
  out.array() -= out.mean();
  const double s = sample_std(out);
  if (s > 0.0) out /= s;
  return out;
}

}  // namespace

Eigen::VectorXd gen_noise(const NoiseSpec& spec, Eigen::Index L) {
  if (L < 2) throw InputError("noise length must be >= 2");
  if (!(spec.sigma >= 0.0)) throw InputError("noise scale must be nonnegative");
  Eigen::VectorXd unit;
  if (spec.kind == NoiseKind::gaussian) {
    GaussianStream rng(spec.seed);
    unit.resize(L);
    for (Eigen::Index i = 0; i < L; ++i) unit[i] = rng();
  } else {
    unit = shaped(spec.kind, L, spec.seed);
  }
  return spec.sigma * unit;
}

Eigen::VectorXd sigma_sweep() {
  constexpr int n = 100;
  constexpr double lo = 0.001, hi = 0.01;
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i) s[i] = lo + i * ((hi - lo) / (n - 1));
  s[n - 1] = hi;
  return s;
}

}  // namespace stardgt::noise
