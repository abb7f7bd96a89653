#pragma once

// Slow, direct reference computations. Nothing here calls into the transform,
// Weil or noise code of the library, so agreement is a real cross-check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

namespace oracle {

using cd = std::complex<double>;
using Index = Eigen::Index;

inline Index wrap(Index i, Index L) { return ((i % L) + L) % L; }

/// e^{2 pi i k / n}, with the phase reduced exactly before the trig call.
inline cd unit_root(std::int64_t k, std::int64_t n) {
  const long double t = 2.0L * std::numbers::pi_v<long double> *
                        static_cast<long double>(((k % n) + n) % n) / static_cast<long double>(n);
  return {static_cast<double>(std::cos(t)), static_cast<double>(std::sin(t))};
}

/// c(m, n) = sum_l x_l conj(g(l - na)) e^{-2 pi i m b l / L}, all M rows.
inline Eigen::MatrixXcd naive_dgt(const Eigen::VectorXcd& x, const Eigen::VectorXcd& g, Index a,
                                  Index b) {
  const Index L = x.size(), M = L / b, N = L / a;
  Eigen::MatrixXcd c(M, N);
  for (Index n = 0; n < N; ++n)
    for (Index m = 0; m < M; ++m) {
      cd acc = 0.0;
      for (Index l = 0; l < L; ++l)
        acc += x[l] * std::conj(g[wrap(l - n * a, L)]) * unit_root(-m * b * l, L);
      c(m, n) = acc;
    }
  return c;
}

/// x_l = sum_{m,n} c(m, n) g(l - na) e^{2 pi i m b l / L}.
inline Eigen::VectorXcd naive_idgt(const Eigen::MatrixXcd& c, const Eigen::VectorXcd& g, Index a,
                                   Index b) {
  const Index L = g.size(), M = L / b, N = L / a;
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(L);
  for (Index l = 0; l < L; ++l)
    for (Index n = 0; n < N; ++n)
      for (Index m = 0; m < M; ++m)
        x[l] += c(m, n) * g[wrap(l - n * a, L)] * unit_root(m * b * l, L);
  return x;
}

/// Atoms as columns, ordered n * M + m.
inline Eigen::MatrixXcd atoms(const Eigen::VectorXcd& g, Index a, Index b) {
  const Index L = g.size(), M = L / b, N = L / a;
  Eigen::MatrixXcd A(L, M * N);
  for (Index n = 0; n < N; ++n)
    for (Index m = 0; m < M; ++m)
      for (Index l = 0; l < L; ++l) A(l, n * M + m) = g[wrap(l - n * a, L)] * unit_root(m * b * l, L);
  return A;
}

/// S = sum_p phi_p phi_p^H as a dense matrix.
inline Eigen::MatrixXcd frame_operator(const Eigen::VectorXcd& g, Index a, Index b) {
  const Eigen::MatrixXcd A = atoms(g, a, b);
  return A * A.adjoint();
}

/// Dense Zauner unitary straight from the entry formula, with
/// tau^k = (-1)^k e^{i pi k / L} evaluated without any lookup table.
inline Eigen::MatrixXcd zauner_unitary(std::int64_t L) {
  // beta = -1, so beta^{-1} = -1; alpha = 0, delta = -1:
  // exponent = -( -2uv - u^2 ) = u^2 + 2uv
  Eigen::MatrixXcd U(L, L);
  const double s = 1.0 / std::sqrt(static_cast<double>(L));
  for (std::int64_t u = 0; u < L; ++u)
    for (std::int64_t v = 0; v < L; ++v) {
      const std::int64_t k = (u * u + 2 * u * v) % (2 * L);
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      U(u, v) = s * sign * unit_root(k, 2 * L);
    }
  return U;
}

/// ||(I - Q Q^H) g|| where Q spans the eigenvectors of the dense matrix U
/// whose eigenvalues lie within tol of lambda.
inline double eigenspace_distance(const Eigen::MatrixXcd& U, cd lambda, const Eigen::VectorXcd& g,
                                  double tol = 1e-6) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(U);
  std::vector<Index> keep;
  for (Index i = 0; i < U.rows(); ++i)
    if (std::abs(es.eigenvalues()[i] - lambda) < tol) keep.push_back(i);
  if (keep.empty()) return g.norm();
  Eigen::MatrixXcd V(U.rows(), static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) V.col(static_cast<Index>(j)) = es.eigenvectors().col(keep[j]);
  // eigenvectors of a unitary are orthogonal in exact arithmetic; orthonormalize anyway
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(V);
  const Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(U.rows(), V.cols());
  return (g - Q * (Q.adjoint() * g)).norm();
}

/// Inverse of beta mod L by exhaustive search; 0 when none exists.
inline std::int64_t modular_inverse(std::int64_t beta, std::int64_t L) {
  beta = ((beta % L) + L) % L;
  for (std::int64_t v = 1; v < L; ++v)
    if ((beta * v) % L == 1) return v;
  return 0;
}

/// Size of the smallest dependent subset of columns by checking every subset
/// with a full-pivot LU rank; L + 1 when none of size <= L is dependent.
inline int spark(const Eigen::MatrixXcd& A, double threshold = 1e-8) {
  const Index L = A.rows(), P = A.cols();
  std::vector<int> pick;
  for (int s = 1; s <= L && s <= P; ++s) {
    pick.resize(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) pick[static_cast<std::size_t>(i)] = i;
    while (true) {
      Eigen::MatrixXcd B(L, s);
      for (int i = 0; i < s; ++i) B.col(i) = A.col(pick[static_cast<std::size_t>(i)]);
      Eigen::FullPivLU<Eigen::MatrixXcd> lu(B);
      lu.setThreshold(threshold);
      if (lu.rank() < s) return s;
      int i = s - 1;
      while (i >= 0 && pick[static_cast<std::size_t>(i)] == P - s + i) --i;
      if (i < 0) break;
      ++pick[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < s; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return static_cast<int>(L) + 1;
}

/// Least-squares slope, in dB per decade, of 10 log10 |X(f)|^2 against
/// log10 f over f = 1..L/2. Periodogram power is first averaged in
/// logarithmically spaced bands so every decade carries equal weight.
inline double spectral_slope_db_per_decade(const Eigen::VectorXd& x, int bands = 40) {
  const Index L = x.size();
  Eigen::FFT<double> fft;
  std::vector<double> in(x.data(), x.data() + L);
  std::vector<cd> spec;
  fft.fwd(spec, in);
  const double lo = 0.0, hi = std::log10(static_cast<double>(L / 2));
  std::vector<double> sum(static_cast<std::size_t>(bands), 0.0), lf(static_cast<std::size_t>(bands), 0.0);
  std::vector<int> count(static_cast<std::size_t>(bands), 0);
  for (Index f = 1; f <= L / 2; ++f) {
    const double t = std::log10(static_cast<double>(f));
    int band = static_cast<int>((t - lo) / (hi - lo) * bands);
    if (band >= bands) band = bands - 1;
    const auto k = static_cast<std::size_t>(band);
    sum[k] += std::norm(spec[static_cast<std::size_t>(f)]);
    lf[k] += t;
    ++count[k];
  }
  std::vector<double> X, Y;
  for (std::size_t k = 0; k < sum.size(); ++k)
    if (count[k] > 0) {
      X.push_back(lf[k] / count[k]);
      Y.push_back(10.0 * std::log10(sum[k] / count[k]));
    }
  const double n = static_cast<double>(X.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    sx += X[i];
    sy += Y[i];
    sxx += X[i] * X[i];
    sxy += X[i] * Y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace oracle
