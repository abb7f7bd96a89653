#include "stardgt/zauner.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "stardgt/error.hpp"
#include "stardgt/random.hpp"

namespace stardgt::zauner {

namespace {

std::int64_t mod(std::int64_t v, std::int64_t m) {
  const std::int64_t r = v % m;
  return r < 0 ? r + m : r;
}

std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m) {
  return static_cast<std::int64_t>((static_cast<__int128>(mod(a, m)) * mod(b, m)) % m);
}

void put_u32(std::ostream& os, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::ostream& os, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(std::istream& is, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw CorruptHeader("truncated window file");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

}  // namespace

SymplecticMatrix::SymplecticMatrix(std::int64_t L_, std::int64_t a, std::int64_t b,
                                   std::int64_t c, std::int64_t d)
    : L(L_) {
  if (L < 2) throw InputError("symplectic matrix requires L >= 2");
  alpha = mod(a, L);
  beta = mod(b, L);
  gamma = mod(c, L);
  delta = mod(d, L);
  if (mod(mulmod(alpha, delta, L) - mulmod(beta, gamma, L), L) != 1)
    throw InputError("matrix is not in SL(2, Z_L): determinant != 1");
}

SymplecticMatrix SymplecticMatrix::operator*(const SymplecticMatrix& o) const {
  if (L != o.L) throw InputError("symplectic matrices over different rings");
  return {L, mulmod(alpha, o.alpha, L) + mulmod(beta, o.gamma, L),
          mulmod(alpha, o.beta, L) + mulmod(beta, o.delta, L),
          mulmod(gamma, o.alpha, L) + mulmod(delta, o.gamma, L),
          mulmod(gamma, o.beta, L) + mulmod(delta, o.delta, L)};
}

bool SymplecticMatrix::is_identity() const {
  return alpha == 1 % L && beta == 0 && gamma == 0 && delta == 1 % L;
}

SymplecticMatrix zauner_matrix(std::int64_t L) { return {L, 0, L - 1, 1, L - 1}; }

WeilOperator::WeilOperator(const SymplecticMatrix& G, double theta)
    : L_(G.L), two_L_(2 * G.L), alpha_(G.alpha), delta_(G.delta), theta_(theta) {
  beta_inv_ = ringmod::mod_inverse(ringmod::Residue(G.beta, L_)).value();
  // tau = -e^{i pi/L} = e^{i pi (L+1)/L}; tabulate scale * tau^k for k mod 2L
  const cd scale = std::polar(1.0 / std::sqrt(static_cast<double>(L_)), theta);
  tau_pow_.resize(two_L_);
  for (std::int64_t k = 0; k < two_L_; ++k) {
    const std::int64_t e = mulmod(k, L_ + 1, two_L_);
    tau_pow_[k] = scale * std::polar(1.0, std::numbers::pi * static_cast<double>(e) /
                                              static_cast<double>(L_));
  }
}

cd WeilOperator::entry(std::int64_t u, std::int64_t v) const {
  const std::int64_t q = mulmod(alpha_, v * v, two_L_) - mulmod(2 * u, v, two_L_) +
                         mulmod(delta_, u * u, two_L_);
  return tau_pow_[mulmod(beta_inv_, q, two_L_)];
}

Eigen::VectorXcd WeilOperator::apply(const Eigen::VectorXcd& x) const {
  if (x.size() != L_) throw DimensionMismatch("Weil operator applied to wrong length");
  const std::int64_t m = two_L_;
  std::vector<std::int64_t> col_term(L_);
  const std::int64_t ba = mulmod(beta_inv_, alpha_, m);
  for (std::int64_t v = 0; v < L_; ++v) col_term[v] = mulmod(ba, v * v, m);
  const std::int64_t bd = mulmod(beta_inv_, delta_, m);

  Eigen::VectorXcd out(L_);
  const cd* table = tau_pow_.data();
  const cd* xs = x.data();
  for (std::int64_t u = 0; u < L_; ++u) {
    const std::int64_t row_term = mulmod(bd, u * u, m);
    const std::int64_t step = mod(-2 * mulmod(beta_inv_, u, m), m);
    std::int64_t cross = 0;
    double re = 0.0, im = 0.0;
    for (std::int64_t v = 0; v < L_; ++v) {
      std::int64_t e = row_term + col_term[v];
      if (e >= m) e -= m;
      e += cross;
      if (e >= m) e -= m;
      const cd t = table[e];
      const cd xv = xs[v];
      re += t.real() * xv.real() - t.imag() * xv.imag();
      im += t.real() * xv.imag() + t.imag() * xv.real();
      cross += step;
      if (cross >= m) cross -= m;
    }
    out[u] = {re, im};
  }
  return out;
}

Eigen::MatrixXcd WeilOperator::dense() const {
  Eigen::MatrixXcd U(L_, L_);
  for (std::int64_t v = 0; v < L_; ++v)
    for (std::int64_t u = 0; u < L_; ++u) U(u, v) = entry(u, v);
  return U;
}

Eigen::MatrixXcd weil_unitary(const SymplecticMatrix& G, double theta) {
  return WeilOperator(G, theta).dense();
}

double unitarity_defect(const Eigen::MatrixXcd& U) {
  const Eigen::MatrixXcd D = U * U.adjoint() - Eigen::MatrixXcd::Identity(U.rows(), U.cols());
  return D.cwiseAbs().maxCoeff();
}

CubePhase zauner_cube_phase(const Eigen::MatrixXcd& U) {
  const Eigen::MatrixXcd U3 = U * U * U;
  // the least-squares scalar in the max norm is close to the diagonal mean
  const cd gamma = U3.diagonal().mean();
  const Eigen::Index n = U.rows();
  const double residual =
      (U3 - gamma * Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (residual > 1e-6) {
    throw NotOrderThree("U^3 is not a scalar multiple of the identity (residual " +
                        std::to_string(residual) + ")");
  }
  return {gamma / std::abs(gamma), residual};
}

const char* to_string(EigenMethod m) {
  return m == EigenMethod::projector ? "projector" : "power_iteration";
}

EigenMethod eigen_method_from_string(const std::string& s) {
  if (s == "projector") return EigenMethod::projector;
  if (s == "power_iteration" || s == "power") return EigenMethod::power_iteration;
  throw InputError("unknown eigenvector method '" + s + "'");
}

void canonicalize_phase(Eigen::VectorXcd& g) {
  Eigen::Index k = 0;
  g.cwiseAbs().maxCoeff(&k);
  const double mag = std::abs(g[k]);
  if (mag == 0.0) return;
  g *= std::conj(g[k]) / mag;
  g[k] = mag;
}

namespace {

Eigen::VectorXcd seeded_vector(std::int64_t L, std::uint64_t seed) {
  GaussianStream rng(seed);
  Eigen::VectorXcd v(L);
  for (std::int64_t i = 0; i < L; ++i) {
    const double re = rng();
    v[i] = {re, rng()};
  }
  return v;
}

StarWindow finish(const WeilOperator& U, Eigen::VectorXcd g) {
  g.normalize();
  canonicalize_phase(g);
  const Eigen::VectorXcd Ug = U.apply(g);
  const cd lambda = g.dot(Ug);  // conjugates g
  const double residual = (Ug - lambda * g).norm();
  return {std::move(g), lambda, residual};
}

}  // namespace

StarWindow star_window(std::int64_t L, const StarWindowOptions& opts) {
  const auto adm = ringmod::check_admissible(static_cast<std::uint64_t>(std::max<std::int64_t>(L, 0)),
                                             opts.mode);
  if (!adm.admissible) {
    std::string why;
    for (const auto& r : adm.reasons) why += (why.empty() ? "" : ", ") + r;
    throw AdmissibilityError("L = " + std::to_string(L) + " is not " + to_string(opts.mode) +
                             "-admissible: " + why);
  }
  const WeilOperator U(zauner_matrix(L), opts.theta);
  const Eigen::VectorXcd v = seeded_vector(L, opts.seed);

  if (opts.method == EigenMethod::power_iteration) {
    Eigen::VectorXcd x = v.normalized();
    for (int it = 0; it < opts.max_power_iterations; ++it) {
      Eigen::VectorXcd w = U.apply(x);
      const cd lambda = x.dot(w);
      if ((w - lambda * x).norm() <= 1e-8) return finish(U, std::move(x));
      x = w / w.norm();
    }
    throw ConvergenceError("power iteration on U_Z did not converge in " +
                           std::to_string(opts.max_power_iterations) + " iterations");
  }

  // U^3 = gamma I, so P_k = (I + U/lambda_k + U^2/lambda_k^2) / 3 projects onto
  // the eigenspace of the cube root lambda_k of gamma.
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(L);
  e0[0] = 1.0;
  const Eigen::VectorXcd u3e0 = U.apply(U.apply(U.apply(e0)));
  const cd gamma = u3e0[0];
  Eigen::VectorXcd cube_defect = u3e0 - gamma * e0;
  if (cube_defect.cwiseAbs().maxCoeff() > 1e-6)
    throw NotOrderThree("U_Z^3 is not scalar for L = " + std::to_string(L));

  const Eigen::VectorXcd Uv = U.apply(v);
  const Eigen::VectorXcd UUv = U.apply(Uv);
  const double r = std::cbrt(std::abs(gamma));
  const double arg = std::arg(gamma);
  for (int k = 0; k < 3; ++k) {
    const cd lambda = std::polar(r, (arg + 2.0 * std::numbers::pi * k) / 3.0);
    const cd inv = 1.0 / lambda;
    Eigen::VectorXcd p = (v + inv * Uv + inv * inv * UUv) / 3.0;
    if (p.norm() <= 1e-6 * v.norm()) continue;
    StarWindow w = finish(U, std::move(p));
    if (w.residual > 1e-8) {
      throw ConvergenceError("projected star window has eigen-residual " +
                             std::to_string(w.residual));
    }
    return w;
  }
  throw ConvergenceError("every eigenspace projection of the seed vector vanished");
}

void save_window(const std::filesystem::path& path, const Eigen::VectorXcd& g,
                 std::uint64_t seed) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(kWindowMagic, sizeof kWindowMagic);
  put_u32(os, kWindowFormatVersion);
  put_u64(os, static_cast<std::uint64_t>(g.size()));
  put_u64(os, seed);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    put_u64(os, std::bit_cast<std::uint64_t>(g[i].real()));
    put_u64(os, std::bit_cast<std::uint64_t>(g[i].imag()));
  }
  if (!os) throw IoError("write failed for " + path.string());
}

LoadedWindow load_window(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  char magic[8];
  if (!is.read(magic, sizeof magic) || !std::equal(magic, magic + 8, kWindowMagic))
    throw CorruptHeader(path.string() + " is not a window file");
  const auto version = static_cast<std::uint32_t>(get_le(is, 4));
  if (version != kWindowFormatVersion)
    throw UnsupportedFormat("window file version " + std::to_string(version));
  const std::uint64_t L = get_le(is, 8);
  const std::uint64_t seed = get_le(is, 8);
  if (L < 1 || L > (std::uint64_t{1} << 32)) throw CorruptHeader("implausible window length");
  LoadedWindow out{Eigen::VectorXcd(static_cast<Eigen::Index>(L)), seed};
  for (std::uint64_t i = 0; i < L; ++i) {
    const double re = std::bit_cast<double>(get_le(is, 8));
    const double im = std::bit_cast<double>(get_le(is, 8));
    out.g[static_cast<Eigen::Index>(i)] = {re, im};
  }
  return out;
}

std::filesystem::path cache_path(const std::filesystem::path& dir, std::int64_t L,
                                 const StarWindowOptions& opts) {
  std::ostringstream name;
  name << "star_L" << L << '_' << to_string(opts.method) << "_s" << opts.seed << "_t"
       << std::hexfloat << opts.theta << ".bin";
  return dir / name.str();
}

StarWindow cached_star_window(const std::filesystem::path& dir, std::int64_t L,
                              const StarWindowOptions& opts) {
  const auto path = cache_path(dir, L, opts);
  if (std::filesystem::exists(path)) {
    LoadedWindow w = load_window(path);
    if (w.g.size() == L && w.seed == opts.seed) {
      const WeilOperator U(zauner_matrix(L), opts.theta);
      const Eigen::VectorXcd Ug = U.apply(w.g);
      const cd lambda = w.g.dot(Ug);
      const double residual = (Ug - lambda * w.g).norm();
      if (residual <= 1e-8) return {std::move(w.g), lambda, residual};
    }
  }
  StarWindow w = star_window(L, opts);
  std::filesystem::create_directories(dir);
  save_window(path, w.g, opts.seed);
  return w;
}

}  // namespace stardgt::zauner
