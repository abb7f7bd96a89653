#include "stardgt/harness.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "stardgt/error.hpp"
#include "stardgt/wav.hpp"

namespace stardgt::harness {

SignalRecord load_wav(const std::filesystem::path& path) {
  wav::PcmMono16 pcm = wav::read(path);
  SignalRecord s;
  s.label = path.stem().string();
  s.sample_rate = pcm.sample_rate;
  s.true_dim = pcm.samples.size();
  s.artificial_dim = s.true_dim;
  s.samples = std::move(pcm.samples);
  return s;
}

std::optional<Index> replication_dimension(Index true_dim) {
  static const std::map<Index, Index> table{
      {36240, 33915}, {27680, 27531}, {42800, 41769}, {34400, 33915}, {43760, 43605},
      {31040, 29835}, {51360, 51051}, {52880, 51051}, {43600, 41769}, {34880, 33915}};
  const auto it = table.find(true_dim);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

SignalRecord truncate_to_admissible(const SignalRecord& s, ringmod::AdmissibilityMode mode,
                                    std::uint64_t prime_cap, std::optional<Index> forced_L) {
  Index L = 0;
  if (forced_L) {
    L = *forced_L;
    if (L < 3 || L > s.true_dim) {
      throw AdmissibilityError("forced L = " + std::to_string(L) + " must lie in [3, " +
                               std::to_string(s.true_dim) + "]");
    }
    if (!ringmod::is_admissible(static_cast<std::uint64_t>(L), mode)) {
      throw AdmissibilityError("forced L = " + std::to_string(L) + " is not " +
                               ringmod::to_string(mode) + "-admissible");
    }
  } else {
    if (s.true_dim < 3) throw EmptyResult("signal is shorter than 3 samples");
    L = static_cast<Index>(
        ringmod::enumerate_dimensions(static_cast<std::uint64_t>(s.true_dim), mode, prime_cap, 1)
            .front()
            .L);
  }
  SignalRecord out = s;
  out.samples = s.samples.head(L);
  out.artificial_dim = L;
  return out;
}

Eigen::VectorXd speech_like_fixture(int sample_rate, double seconds) {
  struct Syllable {
    double start, length, f0_begin, f0_end, formant1, formant2;
  };
  // voiced stretches of ~0.2-0.35 s separated by short silences
  static constexpr Syllable kSyllables[] = {
      {0.000, 0.300, 125.0, 165.0, 700.0, 1200.0}, {0.380, 0.220, 180.0, 140.0, 400.0, 2100.0},
      {0.680, 0.340, 140.0, 120.0, 550.0, 1700.0}, {1.100, 0.260, 150.0, 200.0, 300.0, 2300.0},
      {1.450, 0.300, 170.0, 130.0, 650.0, 1000.0}, {1.850, 0.280, 135.0, 150.0, 500.0, 1500.0},
      {2.200, 0.300, 160.0, 125.0, 750.0, 1100.0}, {2.580, 0.350, 120.0, 170.0, 450.0, 1900.0}};
  const auto n = static_cast<Index>(std::lround(seconds * sample_rate));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  const double fs = sample_rate;
  const double two_pi = 2.0 * std::numbers::pi;
  for (const auto& syl : kSyllables) {
    const auto first = static_cast<Index>(std::lround(syl.start * fs));
    const auto count = static_cast<Index>(std::lround(syl.length * fs));
    double phase = 0.0;
    for (Index i = 0; i < count && first + i < n; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(count);
      const double f0 = syl.f0_begin + (syl.f0_end - syl.f0_begin) * u;
      phase += two_pi * f0 / fs;
      const double env = std::pow(std::sin(std::numbers::pi * u), 2);
      double v = 0.0;
      for (int k = 1; k * f0 < 0.45 * fs && k <= 24; ++k) {
        const double fk = k * f0;
        const double w = (1.0 + 3.0 * std::exp(-std::pow((fk - syl.formant1) / 180.0, 2)) +
                          2.0 * std::exp(-std::pow((fk - syl.formant2) / 250.0, 2))) /
                         k;
        v += w * std::sin(k * phase);
      }
      x[first + i] += env * v;
    }
  }
  const double peak = x.cwiseAbs().maxCoeff();
  if (peak > 0.0) x *= 0.5 / peak;
  // quantize to the 16-bit grid so the fixture survives a WAV round trip
  for (Index i = 0; i < n; ++i) x[i] = std::round(x[i] * 32768.0) / 32768.0;
  return x;
}

double mse(const Eigen::VectorXd& x, const Eigen::VectorXd& xhat, MseNormalization norm) {
  if (x.size() != xhat.size()) throw DimensionMismatch("mse of vectors with different lengths");
  if (x.size() == 0) return 0.0;
  const double sq = (x - xhat).squaredNorm();
  return norm == MseNormalization::raw ? sq : sq / static_cast<double>(x.size());
}

Observation observe(const Eigen::VectorXd& x, const Eigen::VectorXd& e) {
  if (x.size() != e.size()) throw DimensionMismatch("noise length does not match signal");
  return {x, e, x + e};
}

std::uint64_t trial_seed(std::uint64_t base_seed, int trial, noise::NoiseKind kind,
                         std::size_t sigma_index) {
  // splitmix64 finalizer over the cell coordinates
  std::uint64_t z = base_seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(trial) + 1) +
                    0xBF58476D1CE4E5B9ull * (static_cast<std::uint64_t>(kind) + 1) +
                    0x94D049BB133111EBull * (sigma_index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<gabor::Window<double>> build_windows(const ExperimentConfig& cfg, Index L) {
  std::vector<gabor::Window<double>> out;
  for (const auto kind : cfg.windows) {
    if (kind == gabor::WindowKind::star) {
      zauner::StarWindowOptions opts = cfg.star;
      opts.mode = cfg.admissibility;
      const auto w = cfg.window_cache ? zauner::cached_star_window(*cfg.window_cache, L, opts)
                                      : zauner::star_window(L, opts);
      out.push_back({w.g, kind});
    } else {
      out.push_back(gabor::make_window<double>(kind, L));
    }
  }
  return out;
}

solver::SolverResult denoise(const Eigen::VectorXd& x_for_mu, const Eigen::VectorXd& y,
                             const gabor::Window<double>& g, const gabor::Lattice& lat,
                             double eta, const ExperimentConfig& cfg) {
  auto op = std::make_shared<solver::GaborOperator>(g, lat, cfg.coefficients);
  solver::DenoiseProblem p;
  p.y = y;
  p.op = op;
  p.mu = solver::smoothing_mu(*op, x_for_mu);
  p.eta = eta;
  p.x0 = Eigen::VectorXd::Zero(y.size());
  return solver::solve(p, cfg.solver);
}

ReportMetadata describe(const ExperimentConfig& cfg) {
  ReportMetadata m;
  m.admissibility_mode = ringmod::to_string(cfg.admissibility);
  m.coefficient_mode = cfg.coefficients == gabor::CoefficientMode::real ? "real" : "full";
  if (cfg.eta) {
    std::ostringstream os;
    os.precision(17);
    os << "fixed:" << *cfg.eta;
    m.eta_rule = os.str();
  } else {
    m.eta_rule = "noise_norm";
  }
  m.mu_rule = cfg.mu_from == MuSource::clean ? "0.1*max|Phi x| (clean)" : "0.1*max|Phi y| (observed)";
  m.rng = noise::rng_name();
  m.mse_normalization = cfg.mse_norm == MseNormalization::raw ? "raw" : "per_sample";
  std::ostringstream solver;
  solver << (cfg.solver.algorithm == solver::Algorithm::reference_admm ? "reference_admm"
                                                                       : "accelerated_primal_dual")
         << " max_iter=" << cfg.solver.max_iter << " tol=" << cfg.solver.tol;
  m.solver = solver.str();
  m.star_seed = cfg.star.seed;
  for (int t = 0; t < cfg.trials; ++t) m.seeds.push_back(cfg.base_seed + static_cast<std::uint64_t>(t));
  return m;
}

namespace {

struct Cell {
  std::vector<double> mse;
  bool converged = true;
};

/// Runs every trial of one (noise kind, sigma, lattice) cell for all windows.
std::vector<Cell> run_cell(const SignalRecord& s, const gabor::Lattice& lat,
                           const std::vector<gabor::Window<double>>& windows,
                           noise::NoiseKind kind, double sigma, std::size_t sigma_index,
                           const ExperimentConfig& cfg) {
  std::vector<Cell> cells(windows.size());
  for (int t = 0; t < cfg.trials; ++t) {
    const std::uint64_t seed =
        trial_seed(cfg.base_seed, t, kind, sigma_index);
    const Eigen::VectorXd e = noise::gen_noise({kind, sigma, seed}, s.artificial_dim);
    const Observation obs = observe(s.samples, e);
    const double eta = cfg.eta ? *cfg.eta : e.norm();
    const Eigen::VectorXd& mu_source = cfg.mu_from == MuSource::clean ? obs.x : obs.y;
    for (std::size_t w = 0; w < windows.size(); ++w) {
      const auto r = denoise(mu_source, obs.y, windows[w], lat, eta, cfg);
      const double m = mse(obs.x, r.x, cfg.mse_norm);
      if (!std::isfinite(m)) throw NumericalError("non-finite MSE");
      cells[w].mse.push_back(m);
      cells[w].converged = cells[w].converged && r.converged;
    }
  }
  return cells;
}

ExperimentRecord make_record(const SignalRecord& s, const gabor::Window<double>& w,
                             noise::NoiseKind kind, double sigma, const gabor::Lattice& lat,
                             Cell cell) {
  ExperimentRecord r;
  r.signal = s.label;
  r.window = gabor::to_string(w.kind);
  r.noise = noise::to_string(kind);
  r.sigma = sigma;
  r.L = lat.L;
  r.a = lat.a;
  r.b = lat.b;
  r.trials = static_cast<int>(cell.mse.size());
  double sum = 0.0;
  for (double m : cell.mse) sum += m;
  r.mse = cell.mse.empty() ? 0.0 : sum / static_cast<double>(cell.mse.size());
  r.trial_mse = std::move(cell.mse);
  r.converged = cell.converged;
  return r;
}

void check_signal(const SignalRecord& s, const ExperimentConfig& cfg) {
  if (s.samples.size() != s.artificial_dim)
    throw DimensionMismatch("signal record length disagrees with its dimension");
  if (!ringmod::is_admissible(static_cast<std::uint64_t>(s.artificial_dim), cfg.admissibility))
    throw AdmissibilityError("signal dimension " + std::to_string(s.artificial_dim) +
                             " is not admissible");
  if (cfg.trials < 1) throw InputError("trials must be >= 1");
}

}  // namespace

ExperimentReport run_sigma_sweep(const SignalRecord& s, const gabor::Lattice& lat,
                                 const ExperimentConfig& cfg,
                                 std::optional<Eigen::VectorXd> sigmas) {
  check_signal(s, cfg);
  if (lat.L != s.artificial_dim) throw InvalidLattice("lattice L does not match signal");
  const Eigen::VectorXd sig = sigmas ? *sigmas : noise::sigma_sweep();
  const auto windows = build_windows(cfg, lat.L);

  // [window][kind][sigma]
  std::vector<std::vector<std::vector<Cell>>> grid(
      windows.size(), std::vector<std::vector<Cell>>(cfg.noises.size(),
                                                     std::vector<Cell>(static_cast<std::size_t>(sig.size()))));
  for (std::size_t k = 0; k < cfg.noises.size(); ++k)
    for (Index i = 0; i < sig.size(); ++i) {
      auto cells = run_cell(s, lat, windows, cfg.noises[k], sig[i], static_cast<std::size_t>(i), cfg);
      for (std::size_t w = 0; w < windows.size(); ++w) grid[w][k][static_cast<std::size_t>(i)] = std::move(cells[w]);
    }

  ExperimentReport rep{describe(cfg), {}};
  for (std::size_t w = 0; w < windows.size(); ++w)
    for (std::size_t k = 0; k < cfg.noises.size(); ++k)
      for (Index i = 0; i < sig.size(); ++i)
        rep.records.push_back(make_record(s, windows[w], cfg.noises[k], sig[i], lat,
                                          std::move(grid[w][k][static_cast<std::size_t>(i)])));
  return rep;
}

ExperimentReport run_lattice_grid(const SignalRecord& s,
                                  const std::vector<std::pair<Index, Index>>& pairs, double sigma,
                                  const ExperimentConfig& cfg) {
  check_signal(s, cfg);
  std::vector<gabor::Lattice> lattices;
  for (const auto& [a, b] : pairs) lattices.push_back(gabor::Lattice::make(s.artificial_dim, a, b));
  const auto windows = build_windows(cfg, s.artificial_dim);

  // [window][pair][kind]
  std::vector<std::vector<std::vector<Cell>>> grid(
      windows.size(),
      std::vector<std::vector<Cell>>(lattices.size(), std::vector<Cell>(cfg.noises.size())));
  for (std::size_t p = 0; p < lattices.size(); ++p)
    for (std::size_t k = 0; k < cfg.noises.size(); ++k) {
      auto cells = run_cell(s, lattices[p], windows, cfg.noises[k], sigma, 0, cfg);
      for (std::size_t w = 0; w < windows.size(); ++w) grid[w][p][k] = std::move(cells[w]);
    }

  ExperimentReport rep{describe(cfg), {}};
  for (std::size_t w = 0; w < windows.size(); ++w)
    for (std::size_t p = 0; p < lattices.size(); ++p)
      for (std::size_t k = 0; k < cfg.noises.size(); ++k)
        rep.records.push_back(
            make_record(s, windows[w], cfg.noises[k], sigma, lattices[p], std::move(grid[w][p][k])));
  return rep;
}

}  // namespace stardgt::harness
