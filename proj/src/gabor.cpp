#include "stardgt/gabor.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace stardgt::gabor {

Lattice Lattice::make(Index L, Index a, Index b) {
  if (L < 1 || a < 1 || b < 1) throw InvalidLattice("lattice parameters must be positive");
  if (L % a != 0 || L % b != 0) {
    throw InvalidLattice("a = " + std::to_string(a) + " and b = " + std::to_string(b) +
                         " must both divide L = " + std::to_string(L));
  }
  if (a * b > L) {
    throw InvalidLattice("undersampled lattice: ab = " + std::to_string(a * b) + " > L = " +
                         std::to_string(L));
  }
  return {L, a, b, L / b, L / a};
}

const char* to_string(WindowKind k) {
  switch (k) {
    case WindowKind::gauss: return "gauss";
    case WindowKind::hann: return "hann";
    case WindowKind::hamming: return "hamming";
    case WindowKind::star: return "star";
    case WindowKind::custom: return "custom";
  }
  return "?";
}

WindowKind window_kind_from_string(const std::string& s) {
  if (s == "gauss" || s == "gaussian") return WindowKind::gauss;
  if (s == "hann") return WindowKind::hann;
  if (s == "hamming") return WindowKind::hamming;
  if (s == "star") return WindowKind::star;
  if (s == "custom") return WindowKind::custom;
  throw InputError("unknown window kind '" + s + "'");
}

Eigen::VectorXd window_shape(WindowKind kind, Index L) {
  if (L < 2) throw InputError("window length must be >= 2");
  Eigen::VectorXd w(L);
  const double two_pi = 2.0 * std::numbers::pi;
  for (Index l = 0; l < L; ++l) {
    const double t = static_cast<double>(l);
    switch (kind) {
      case WindowKind::gauss: {
        const double d = static_cast<double>(std::min(l, L - l));
        w[l] = std::exp(-std::numbers::pi * d * d / static_cast<double>(L));
        break;
      }
      case WindowKind::hann:
        w[l] = 0.5 * (1.0 - std::cos(two_pi * t / static_cast<double>(L)));
        break;
      case WindowKind::hamming:
        w[l] = 0.54 - 0.46 * std::cos(two_pi * t / static_cast<double>(L));
        break;
      default:
        throw InputError(std::string("no closed-form shape for window kind ") + to_string(kind));
    }
  }
  return w;
}

Window<double> make_window_d(WindowKind kind, Index L, const zauner::StarWindowOptions& star) {
  if (L < 2) throw InputError("window length must be >= 2");
  if (kind == WindowKind::star) return {zauner::star_window(L, star).g, WindowKind::star};
  if (kind == WindowKind::custom) throw InputError("custom windows are built from samples");
  const Eigen::VectorXd w = window_shape(kind, L);
  return {(w / w.norm()).cast<std::complex<double>>(), kind};
}

FrameBounds frame_bounds(const Window<double>& g, const Lattice& lat) {
  const Eigen::MatrixXcd atoms = gabor_system(g, lat);
  const Eigen::MatrixXcd S = atoms * atoms.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  return {std::max(0.0, ev.minCoeff()), std::max(0.0, ev.maxCoeff())};
}

namespace {

std::uint64_t saturating_binomial_sum(std::uint64_t P, std::uint64_t smax) {
  constexpr std::uint64_t cap = std::numeric_limits<std::uint64_t>::max() / 2;
  std::uint64_t total = 0;
  long double c = 1.0L;
  for (std::uint64_t s = 1; s <= smax; ++s) {
    c = c * static_cast<long double>(P - s + 1) / static_cast<long double>(s);
    if (c >= static_cast<long double>(cap)) return cap;
    total += static_cast<std::uint64_t>(c + 0.5L);
    if (total >= cap) return cap;
  }
  return total;
}

bool dependent(const Eigen::MatrixXcd& sub, double rel_threshold) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sub);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv.maxCoeff();
  if (smax == 0.0) return true;
  if (sub.cols() > sub.rows()) return true;
  return sv.minCoeff() < rel_threshold * smax;
}

}  // namespace

int spark_oracle(const Eigen::MatrixXcd& vectors, std::uint64_t limit, double rel_threshold) {
  const Index L = vectors.rows();
  const Index P = vectors.cols();
  const Index smax = std::min(L, P);
  const std::uint64_t worst = saturating_binomial_sum(static_cast<std::uint64_t>(P),
                                                      static_cast<std::uint64_t>(smax));
  if (worst > limit) {
    throw TooLarge("spark enumeration needs up to " + std::to_string(worst) +
                   " rank tests, limit is " + std::to_string(limit));
  }
  for (Index s = 1; s <= smax; ++s) {
    std::vector<Index> idx(static_cast<std::size_t>(s));
    for (Index i = 0; i < s; ++i) idx[static_cast<std::size_t>(i)] = i;
    Eigen::MatrixXcd sub(L, s);
    while (true) {
      for (Index i = 0; i < s; ++i) sub.col(i) = vectors.col(idx[static_cast<std::size_t>(i)]);
      if (dependent(sub, rel_threshold)) return static_cast<int>(s);
      // next combination in lexicographic order
      Index i = s - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == P - s + i) --i;
      if (i < 0) break;
      ++idx[static_cast<std::size_t>(i)];
      for (Index j = i + 1; j < s; ++j)
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return static_cast<int>(L + 1);
}

}  // namespace stardgt::gabor
