#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "stardgt/error.hpp"
#include "stardgt/gabor.hpp"
#include "stardgt/random.hpp"

using namespace stardgt;
using namespace stardgt::gabor;

namespace {

Eigen::VectorXcd random_cvec(Index n, std::uint64_t seed) {
  GaussianStream rng(seed);
  Eigen::VectorXcd v(n);
  for (auto& z : v) z = {rng(), rng()};
  return v;
}

Eigen::VectorXd random_rvec(Index n, std::uint64_t seed) {
  GaussianStream rng(seed);
  Eigen::VectorXd v(n);
  for (auto& z : v) z = rng();
  return v;
}

Window<double> random_window(Index L, std::uint64_t seed) { return custom_window<double>(random_cvec(L, seed)); }

}  // namespace

TEST_SUITE("gabor") {

TEST_CASE("lattice validation") {
  const Lattice lat = Lattice::make(105, 5, 7);
  CHECK(lat.M == 15);
  CHECK(lat.N == 21);
  CHECK(lat.P() == 315);
  CHECK(lat.redundant());
  CHECK_FALSE(Lattice::make(15, 3, 5).redundant());
  CHECK_THROWS_AS(Lattice::make(105, 4, 7), InvalidLattice);
  CHECK_THROWS_AS(Lattice::make(105, 15, 21), InvalidLattice);
  CHECK_THROWS_AS(Lattice::make(105, 0, 7), InvalidLattice);
}

TEST_CASE("window shapes") {
  const Eigen::VectorXd hann = window_shape(WindowKind::hann, 4);
  CHECK((hann - Eigen::Vector4d(0, 0.5, 1, 0.5)).cwiseAbs().maxCoeff() < 1e-15);
  const Eigen::VectorXd ham = window_shape(WindowKind::hamming, 4);
  CHECK((ham - Eigen::Vector4d(0.08, 0.54, 1.0, 0.54)).cwiseAbs().maxCoeff() < 1e-15);
  const Eigen::VectorXd gs = window_shape(WindowKind::gauss, 16);
  CHECK(gs[0] == 1.0);
  CHECK(std::abs(gs[4] - std::exp(-std::numbers::pi)) < 1e-15);
  CHECK(gs[3] == gs[13]);
  for (auto k : {WindowKind::gauss, WindowKind::hann, WindowKind::hamming, WindowKind::star}) {
    const Window<double> w = make_window(k, 15);
    CHECK(std::abs(w.values.norm() - 1.0) < 1e-12);
    if (k != WindowKind::star) CHECK(w.values.imag().cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(make_window(WindowKind::star, 35), AdmissibilityError);
  CHECK(window_kind_from_string("hamming") == WindowKind::hamming);
  CHECK_THROWS_AS(window_kind_from_string("kaiser"), InputError);
}

TEST_CASE("gabor system atoms") {
  const Window<double> g = make_window(WindowKind::hann, 12);
  const Lattice lat = Lattice::make(12, 3, 2);
  const Eigen::MatrixXcd A = gabor_system(g, lat);
  CHECK(A.cols() == lat.P());
  CHECK((A.col(0) - g.values).norm() < 1e-15);
  for (Index p = 0; p < A.cols(); ++p) CHECK(std::abs(A.col(p).norm() - 1.0) < 1e-12);
  CHECK((A - oracle::atoms(g.values, 3, 2)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(gabor_system(make_window(WindowKind::star, 3), Lattice::make(3, 1, 1)).cols() == 9);
}

TEST_CASE("delta window sifts") {
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(3);
  d[0] = 1.0;
  const Window<double> g{d, WindowKind::custom};
  const Coefficients<double> c = dgt<double>(d, g, Lattice::make(3, 1, 1));
  CHECK((c.grid.col(0).array() - 1.0).abs().maxCoeff() < 1e-15);
  CHECK(c.grid.rightCols(2).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("fast DGT matches the naive sum") {
  std::mt19937_64 pick(17);
  const Index dims[] = {15, 21, 33, 45, 63, 105, 135, 165, 231, 315};
  int cases = 0;
  for (int t = 0; t < 20; ++t) {
    const Index L = dims[pick() % std::size(dims)];
    std::vector<std::pair<Index, Index>> pairs;
    for (Index a = 1; a <= L; ++a)
      for (Index b = 1; b <= L; ++b)
        if (L % a == 0 && L % b == 0 && a * b < L) pairs.emplace_back(a, b);
    const auto [a, b] = pairs[pick() % pairs.size()];
    CAPTURE(L);
    CAPTURE(a);
    CAPTURE(b);
    const Window<double> g = random_window(L, 100 + t);
    const Eigen::VectorXcd x = random_cvec(L, 200 + t);
    const Coefficients<double> c = dgt<double>(x, g, Lattice::make(L, a, b));
    CHECK((c.grid - oracle::naive_dgt(x, g.values, a, b)).cwiseAbs().maxCoeff() <= 1e-10);
    ++cases;
  }
  CHECK(cases == 20);
}

TEST_CASE("synthesis matches the naive sum") {
  const Lattice lat = Lattice::make(45, 5, 3);
  const Window<double> g = random_window(45, 3);
  GaussianStream rng(8);
  Eigen::MatrixXcd grid(lat.M, lat.N);
  for (Index i = 0; i < grid.size(); ++i) grid(i) = {rng(), rng()};
  const Eigen::VectorXcd x = idgt<double>({grid, CoefficientMode::full}, g, lat);
  CHECK((x - oracle::naive_idgt(grid, g.values, 5, 3)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("linearity and adjointness") {
  for (Index L : {15, 105}) {
    const Lattice lat = L == 15 ? Lattice::make(15, 3, 1) : Lattice::make(105, 5, 7);
    const Window<double> g = make_window(WindowKind::star, L);
    const Eigen::VectorXcd x = random_cvec(L, 1), z = random_cvec(L, 2);
    const std::complex<double> al(0.3, -1.2), be(2.0, 0.5);
    const auto lhs = dgt<double>(al * x + be * z, g, lat).grid;
    const auto rhs = (al * dgt<double>(x, g, lat).grid + be * dgt<double>(z, g, lat).grid).eval();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * rhs.cwiseAbs().maxCoeff());

    GaussianStream rng(L);
    Eigen::MatrixXcd c(lat.M, lat.N);
    for (Index i = 0; i < c.size(); ++i) c(i) = {rng(), rng()};
    const std::complex<double> ip1 = (dgt<double>(x, g, lat).grid.array().conjugate() * c.array()).sum();
    const std::complex<double> ip2 = x.dot(idgt<double>({c, CoefficientMode::full}, g, lat));
    CHECK(std::abs(ip1 - ip2) <= 1e-10 * x.norm() * c.norm());
  }
}

TEST_CASE("a = b = 1 is tight with constant L") {
  for (Index L : {3, 15, 21}) {
    const Lattice lat = Lattice::make(L, 1, 1);
    const Window<double> g = random_window(L, 40 + L);
    const Eigen::VectorXcd x = random_cvec(L, 50 + L);
    const Coefficients<double> c = dgt<double>(x, g, lat);
    const Eigen::VectorXcd back = idgt<double>(c, g, lat);
    CHECK((back - double(L) * x).norm() <= 1e-10 * double(L) * x.norm());
    CHECK(std::abs(c.grid.squaredNorm() - double(L) * x.squaredNorm()) <= 1e-9 * double(L) * x.squaredNorm());
    const FrameBounds fb = frame_bounds(g, lat);
    CHECK(std::abs(fb.c1 - double(L)) <= 1e-8 * L);
    CHECK(std::abs(fb.c2 - double(L)) <= 1e-8 * L);
  }
  const Eigen::MatrixXcd S = oracle::frame_operator(random_window(3, 1).values, 1, 1);
  CHECK((S - 3.0 * Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("real mode keeps the positive-frequency rows") {
  const Lattice lat = Lattice::make(105, 5, 7);
  CHECK(coefficient_rows(lat, CoefficientMode::real) == 8);
  const Eigen::VectorXd x = random_rvec(105, 4);
  for (auto k : {WindowKind::hann, WindowKind::star}) {
    const Window<double> g = make_window(k, 105);
    const auto full = dgt<double>(x.cast<std::complex<double>>(), g, lat);
    const auto half = dgt_real<double>(x, g, lat);
    CHECK(half.mode == CoefficientMode::real);
    CHECK(half.grid.rows() == 8);
    CHECK((half.grid - full.grid.topRows(8)).cwiseAbs().maxCoeff() <= 1e-12);
    if (k == WindowKind::hann) {
      for (Index m = 1; m < lat.M; ++m)
        CHECK((full.grid.row(m) - full.grid.row(lat.M - m).conjugate()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  Eigen::VectorXcd xi = x.cast<std::complex<double>>();
  xi[3] += std::complex<double>(0, 1e-3);
  CHECK_THROWS_AS(dgt_real<double>(xi, make_window(WindowKind::hann, 105), lat), NonRealInput);
  const auto half = dgt_real<double>(x, make_window(WindowKind::hann, 105), lat);
  CHECK_THROWS_AS(idgt<double>(half, make_window(WindowKind::hann, 105), lat), ModeMismatch);
}

TEST_CASE("single precision transform") {
  const Lattice lat = Lattice::make(105, 5, 7);
  const Window<float> g = make_window<float>(WindowKind::gauss, 105);
  const Eigen::VectorXcf x = random_cvec(105, 6).cast<std::complex<float>>();
  const auto c = dgt<float>(x, g, lat);
  const Eigen::MatrixXcd want = oracle::naive_dgt(x.cast<std::complex<double>>(), g.values.cast<std::complex<double>>(), 5, 7);
  CHECK((c.grid.cast<std::complex<double>>() - want).cwiseAbs().maxCoeff() <= 1e-4 * want.cwiseAbs().maxCoeff());
}

TEST_CASE("dimension mismatches") {
  const Lattice lat = Lattice::make(15, 3, 5);
  CHECK_THROWS_AS(dgt<double>(Eigen::VectorXcd::Zero(14), make_window(WindowKind::hann, 15), lat), DimensionMismatch);
  CHECK_THROWS_AS(dgt<double>(Eigen::VectorXcd::Zero(15), make_window(WindowKind::hann, 21), lat), DimensionMismatch);
  CHECK(idgt<double>({Eigen::MatrixXcd::Zero(3, 5), CoefficientMode::full}, make_window(WindowKind::hann, 15), lat).norm() == 0.0);
}

TEST_CASE("frame bounds") {
  const Window<double> star = make_window(WindowKind::star, 15);
  const Lattice lat = Lattice::make(15, 3, 5);
  const FrameBounds fb = frame_bounds(star, lat);
  CHECK(fb.is_frame());
  CHECK(fb.c1 <= fb.c2);
  const Eigen::MatrixXcd S = oracle::frame_operator(star.values, 3, 5);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S);
  CHECK(std::abs(fb.c1 - es.eigenvalues().minCoeff()) <= 1e-8 * fb.c2);
  CHECK(std::abs(fb.c2 - es.eigenvalues().maxCoeff()) <= 1e-8 * fb.c2);
  const FrameBounds twice = frame_bounds({2.0 * star.values, WindowKind::custom}, lat);
  CHECK(std::abs(twice.c1 - 4 * fb.c1) <= 1e-8 * twice.c2);
  CHECK(std::abs(twice.c2 - 4 * fb.c2) <= 1e-8 * twice.c2);
}

TEST_CASE("spark") {
  CHECK(spark_oracle(Eigen::MatrixXcd::Identity(3, 3), 1000) == 4);
  const Lattice lat = Lattice::make(3, 1, 1);
  const Eigen::MatrixXcd star = gabor_system(make_window(WindowKind::star, 3), lat);
  const Eigen::MatrixXcd rnd = gabor_system(random_window(3, 77), lat);
  const int s_star = spark_oracle(star, 1000);
  CHECK(s_star <= 3);
  CHECK(s_star == oracle::spark(star));
  CHECK(spark_oracle(rnd, 1000) == 4);
  CHECK(oracle::spark(rnd) == 4);
  CHECK_THROWS_AS(spark_oracle(gabor_system(make_window(WindowKind::hann, 15), Lattice::make(15, 1, 1)), 1000), TooLarge);
}

TEST_CASE("l1 norm sums moduli") {
  Eigen::VectorXcd v(2);
  v << std::complex<double>(3, 4), std::complex<double>(0, -1);
  CHECK(l1_norm(v) == doctest::Approx(6.0));
}

}  // TEST_SUITE
