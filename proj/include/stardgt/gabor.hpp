#pragma once

// Discrete Gabor systems on Z_L: windows, analysis (DGT) and synthesis
// operators, frame bounds and a brute-force spark oracle.
//
// Translation is cyclic: g(l - na) means g((l - na) mod L). The coefficient
// grid is M x N with c(m, n) the coefficient of g_{n,m}(l) =
// e^{2 pi i m b l / L} g(l - na); flattening is column-major, so atom
// (n, m) sits at index n * rows + m.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "stardgt/error.hpp"
#include "stardgt/zauner.hpp"

namespace stardgt::gabor {

using Index = Eigen::Index;

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

/// Time step a and frequency step b on Z_L, with M = L/b and N = L/a.
struct Lattice {
  Index L = 0, a = 0, b = 0, M = 0, N = 0;

  /// Requires a | L, b | L and ab <= L; throws InvalidLattice otherwise.
  static Lattice make(Index L, Index a, Index b);

  Index P() const { return M * N; }
  /// ab < L, i.e. more atoms than dimensions.
  bool redundant() const { return a * b < L; }
};

enum class WindowKind { gauss, hann, hamming, star, custom };

const char* to_string(WindowKind k);
WindowKind window_kind_from_string(const std::string& s);

template <typename Real = double>
struct Window {
  CVector<Real> values;
  WindowKind kind = WindowKind::custom;

  Index size() const { return values.size(); }
};

enum class CoefficientMode { full, real };

template <typename Real = double>
struct Coefficients {
  CMatrix<Real> grid;  // rows: M (full) or M/2 + 1 (real), cols: N
  CoefficientMode mode = CoefficientMode::full;
};

inline Index coefficient_rows(const Lattice& lat, CoefficientMode mode) {
  return mode == CoefficientMode::full ? lat.M : lat.M / 2 + 1;
}

/// Un-normalized real window samples: periodized Gaussian e^{-pi d(l)^2 / L}
/// (d = circular distance to 0), periodic Hann, periodic Hamming.
Eigen::VectorXd window_shape(WindowKind kind, Index L);

/// Star windows come from the Zauner unitary with the given options.
Window<double> make_window_d(WindowKind kind, Index L, const zauner::StarWindowOptions& star = {});

template <typename Real = double>
Window<Real> make_window(WindowKind kind, Index L, const zauner::StarWindowOptions& star = {}) {
  Window<double> w = make_window_d(kind, L, star);
  return {w.values.template cast<std::complex<Real>>(), w.kind};
}

/// Unit-norm custom window from arbitrary samples.
template <typename Real>
Window<Real> custom_window(const CVector<Real>& values) {
  const Real n = values.norm();
  if (!(n > Real(0))) throw ZeroSignal("window has zero norm");
  return {values / n, WindowKind::custom};
}

namespace detail {

inline void check_window(Index g_size, const Lattice& lat) {
  if (g_size != lat.L)
    throw DimensionMismatch("window length " + std::to_string(g_size) +
                            " does not match lattice L = " + std::to_string(lat.L));
}

template <typename Real>
Index wrap(Index i, Index L) {
  i %= L;
  return i < 0 ? i + L : i;
}

/// w followed by its first M entries, so that any length-M window segment
/// starting below L is contiguous.
template <typename Real>
CVector<Real> extended(const CVector<Real>& w, Index M) {
  CVector<Real> out(w.size() + M);
  out.head(w.size()) = w;
  out.tail(M) = w.head(M);
  return out;
}

/// Full or positive-frequency DGT. x may be real or complex.
template <typename Real, typename XVector>
CMatrix<Real> analysis(const XVector& x, const CVector<Real>& g, const Lattice& lat, Index rows) {
  using C = std::complex<Real>;
  const Index L = lat.L, M = lat.M, N = lat.N, b = lat.b;
  CMatrix<Real> out(rows, N);
  Eigen::FFT<Real> fft;
  CVector<Real> fold(M), spec(M);
  const CVector<Real> gc = extended<Real>(g.conjugate(), M);
  for (Index n = 0; n < N; ++n) {
    fold.setZero();
    // block r covers l in [rM, rM + M); its window samples start at rM - na mod L
    Index start = L - n * lat.a;
    for (Index r = 0; r < b; ++r) {
      if (start >= L) start -= L;
      fold.array() += x.segment(r * M, M).array().template cast<C>() * gc.segment(start, M).array();
      start += M;
    }
    fft.fwd(spec.data(), fold.data(), M);
    out.col(n) = spec.head(rows);
  }
  return out;
}

/// Synthesis from a grid holding the first `grid.rows()` frequency rows, the
/// remaining rows taken as zero.
template <typename Real>
CVector<Real> synthesis(const CMatrix<Real>& grid, const CVector<Real>& g, const Lattice& lat) {
  const Index L = lat.L, M = lat.M, N = lat.N, b = lat.b;
  CVector<Real> x = CVector<Real>::Zero(L);
  Eigen::FFT<Real> fft;
  fft.SetFlag(Eigen::FFT<Real>::Unscaled);
  CVector<Real> col = CVector<Real>::Zero(M), s(M);
  const CVector<Real> ge = extended<Real>(g, M);
  for (Index n = 0; n < N; ++n) {
    col.head(grid.rows()) = grid.col(n);
    fft.inv(s.data(), col.data(), M);  // s_j = sum_m c_m e^{2 pi i m j / M}
    Index start = L - n * lat.a;
    for (Index r = 0; r < b; ++r) {
      if (start >= L) start -= L;
      x.segment(r * M, M).array() += ge.segment(start, M).array() * s.array();
      start += M;
    }
  }
  return x;
}

}  // namespace detail

/// All P = MN atoms as the columns of an L x P matrix, column n * M + m.
template <typename Real>
CMatrix<Real> gabor_system(const Window<Real>& g, const Lattice& lat) {
  detail::check_window(g.size(), lat);
  const Index L = lat.L;
  CMatrix<Real> atoms(L, lat.P());
  const Real two_pi = Real(2) * Real(3.14159265358979323846264338327950288L);
  for (Index n = 0; n < lat.N; ++n)
    for (Index m = 0; m < lat.M; ++m)
      for (Index l = 0; l < L; ++l) {
        const Index ph = (m * lat.b * l) % L;
        atoms(l, n * lat.M + m) =
            std::polar(Real(1), two_pi * Real(ph) / Real(L)) *
            g.values[detail::wrap<Real>(l - n * lat.a, L)];
      }
  return atoms;
}

/// c(m, n) = sum_l x_l conj(g(l - na)) e^{-2 pi i m b l / L}.
template <typename Real>
Coefficients<Real> dgt(const CVector<Real>& x, const Window<Real>& g, const Lattice& lat) {
  detail::check_window(g.size(), lat);
  if (x.size() != lat.L) throw DimensionMismatch("signal length does not match lattice L");
  return {detail::analysis<Real>(x, g.values, lat, lat.M), CoefficientMode::full};
}

/// Rows m = 0..M/2 of the full DGT of a real signal.
template <typename Real>
Coefficients<Real> dgt_real(const RVector<Real>& x, const Window<Real>& g, const Lattice& lat) {
  detail::check_window(g.size(), lat);
  if (x.size() != lat.L) throw DimensionMismatch("signal length does not match lattice L");
  return {detail::analysis<Real>(x, g.values, lat, coefficient_rows(lat, CoefficientMode::real)),
          CoefficientMode::real};
}

/// Complex-typed entry point; throws NonRealInput if any imaginary part is nonzero.
template <typename Real>
Coefficients<Real> dgt_real(const CVector<Real>& x, const Window<Real>& g, const Lattice& lat) {
  if ((x.imag().array() != Real(0)).any()) throw NonRealInput("dgt_real needs a real signal");
  return dgt_real<Real>(RVector<Real>(x.real()), g, lat);
}

/// Synthesis operator, the adjoint of dgt: x_l = sum_{n,m} c(m,n) g(l - na) e^{2 pi i m b l / L}.
template <typename Real>
CVector<Real> idgt(const Coefficients<Real>& c, const Window<Real>& g, const Lattice& lat) {
  if (c.mode != CoefficientMode::full)
    throw ModeMismatch("idgt requires full-mode coefficients");
  detail::check_window(g.size(), lat);
  if (c.grid.rows() != lat.M || c.grid.cols() != lat.N)
    throw DimensionMismatch("coefficient grid shape does not match lattice");
  return detail::synthesis<Real>(c.grid, g.values, lat);
}

struct FrameBounds {
  double c1 = 0.0, c2 = 0.0;
  bool is_frame() const { return c1 > 0.0; }
};

/// Extreme eigenvalues of the frame operator S = sum_p phi_p phi_p^H, built
/// densely (desk-scale L only).
FrameBounds frame_bounds(const Window<double>& g, const Lattice& lat);

/// Size of the smallest linearly dependent subset of the columns of `vectors`
/// (L x P), or L + 1 when every subset of size <= L is independent. A subset is
/// dependent when sigma_min < rel_threshold * sigma_max. Throws TooLarge when the
/// worst-case number of rank tests exceeds `limit`.
int spark_oracle(const Eigen::MatrixXcd& vectors, std::uint64_t limit,
                 double rel_threshold = 1e-8);

/// Sum of moduli.
template <typename Derived>
auto l1_norm(const Eigen::MatrixBase<Derived>& c) {
  return c.cwiseAbs().sum();
}

}  // namespace stardgt::gabor
