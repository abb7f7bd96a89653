#pragma once

// Denoising experiments: signal ingestion and truncation to an admissible
// dimension, noisy observations, MSE, and the sigma-sweep and lattice-grid
// experiment families.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stardgt/gabor.hpp"
#include "stardgt/noise.hpp"
#include "stardgt/ringmod.hpp"
#include "stardgt/solver.hpp"
#include "stardgt/zauner.hpp"

namespace stardgt::harness {

using Index = Eigen::Index;

struct SignalRecord {
  std::string label;
  int sample_rate = 16000;
  Eigen::VectorXd samples;  // length artificial_dim
  Index true_dim = 0;
  Index artificial_dim = 0;
};

/// Mono 16-bit PCM WAV; untruncated, so artificial_dim == true_dim.
SignalRecord load_wav(const std::filesystem::path& path);

/// Forced dimensions for the replication clips, keyed by true length.
std::optional<Index> replication_dimension(Index true_dim);

/// Keeps the first L samples, L being `forced_L` when given, otherwise the
/// largest admissible candidate <= true_dim. Throws EmptyResult when none exists
/// and AdmissibilityError for a forced L that is too long or inadmissible.
SignalRecord truncate_to_admissible(const SignalRecord& s, ringmod::AdmissibilityMode mode,
                                    std::uint64_t prime_cap = 23,
                                    std::optional<Index> forced_L = std::nullopt);

/// Deterministic speech-like test signal: voiced segments made of harmonic
/// chirps with formant-like weighting, separated by silence.
Eigen::VectorXd speech_like_fixture(int sample_rate = 16000, double seconds = 2.0);

enum class MseNormalization { per_sample, raw };

/// ||x - xhat||^2 / L (per_sample) or ||x - xhat||^2 (raw).
double mse(const Eigen::VectorXd& x, const Eigen::VectorXd& xhat,
           MseNormalization norm = MseNormalization::per_sample);

struct Observation {
  Eigen::VectorXd x, e, y;  // y = x + e
};
Observation observe(const Eigen::VectorXd& x, const Eigen::VectorXd& e);

enum class MuSource { clean, observed };

struct ExperimentConfig {
  std::vector<gabor::WindowKind> windows{gabor::WindowKind::gauss, gabor::WindowKind::hann,
                                         gabor::WindowKind::hamming, gabor::WindowKind::star};
  std::vector<noise::NoiseKind> noises{noise::NoiseKind::gaussian};
  int trials = 1;
  std::uint64_t base_seed = 1;
  std::optional<double> eta;  // unset: eta = ||e||_2 of the realized noise
  MuSource mu_from = MuSource::clean;
  gabor::CoefficientMode coefficients = gabor::CoefficientMode::real;
  MseNormalization mse_norm = MseNormalization::per_sample;
  ringmod::AdmissibilityMode admissibility = ringmod::AdmissibilityMode::relaxed;
  solver::SolverConfig solver{};
  zauner::StarWindowOptions star{};
  std::optional<std::filesystem::path> window_cache;
};

struct ReportMetadata {
  std::string admissibility_mode;
  std::string coefficient_mode;
  std::string eta_rule;
  std::string mu_rule;
  std::string rng;
  std::string mse_normalization;
  std::string solver;
  std::uint64_t star_seed = 0;
  std::vector<std::uint64_t> seeds;  // trial seeds before per-cell mixing
  friend bool operator==(const ReportMetadata&, const ReportMetadata&) = default;
};

struct ExperimentRecord {
  std::string signal;
  std::string window;
  std::string noise;
  double sigma = 0.0;
  Index L = 0, a = 0, b = 0;
  int trials = 0;
  double mse = 0.0;  // mean over trials
  std::vector<double> trial_mse;
  bool converged = true;  // every trial's solve converged
  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

struct ExperimentReport {
  ReportMetadata metadata;
  std::vector<ExperimentRecord> records;
  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

/// Seed used for trial t of the (noise kind, sigma index) cell. Identical for
/// all windows so they see the same noise realization.
std::uint64_t trial_seed(std::uint64_t base_seed, int trial, noise::NoiseKind kind,
                         std::size_t sigma_index);

/// Builds the windows of `cfg` for dimension L (star windows through the cache
/// when one is configured).
std::vector<gabor::Window<double>> build_windows(const ExperimentConfig& cfg, Index L);

/// Every (window, noise kind, sigma) cell at a fixed lattice. Sigma defaults
/// to noise::sigma_sweep().
ExperimentReport run_sigma_sweep(const SignalRecord& s, const gabor::Lattice& lat,
                                 const ExperimentConfig& cfg,
                                 std::optional<Eigen::VectorXd> sigmas = std::nullopt);

/// Every (window, lattice pair, noise kind) cell at a fixed sigma. Throws
/// InvalidLattice for pairs that do not divide L.
ExperimentReport run_lattice_grid(const SignalRecord& s,
                                  const std::vector<std::pair<Index, Index>>& pairs, double sigma,
                                  const ExperimentConfig& cfg);

/// One denoising trial; returns the estimate and solver diagnostics.
solver::SolverResult denoise(const Eigen::VectorXd& x_for_mu, const Eigen::VectorXd& y,
                             const gabor::Window<double>& g, const gabor::Lattice& lat,
                             double eta, const ExperimentConfig& cfg);

ReportMetadata describe(const ExperimentConfig& cfg);

}  // namespace stardgt::harness
