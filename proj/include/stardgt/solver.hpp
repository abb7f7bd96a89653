#pragma once

// Regularized analysis basis pursuit denoising:
//
//   minimize ||Phi x||_1 + (mu/2) ||x - x0||_2^2   subject to ||x - y||_2 <= eta
//
// over real x, where Phi maps real signals to complex coefficients and
// ||.||_1 sums complex moduli.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stardgt/gabor.hpp"

namespace stardgt::solver {

using Index = Eigen::Index;

/// Real-linear map R^L -> C^P with its adjoint under Re<.,.>.
class AnalysisOperator {
 public:
  virtual ~AnalysisOperator() = default;

  virtual Index input_size() const = 0;
  virtual Index output_size() const = 0;
  virtual Eigen::VectorXcd forward(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd adjoint(const Eigen::VectorXcd& c) const = 0;

  /// Upper bound on ||Phi||^2. The default pads power_norm_sq by a further 5%.
  virtual double norm_sq_bound() const;
};

/// DGT with a fixed window and lattice, full or positive-frequency rows.
class GaborOperator final : public AnalysisOperator {
 public:
  GaborOperator(gabor::Window<double> g, gabor::Lattice lat,
                gabor::CoefficientMode mode = gabor::CoefficientMode::real);

  Index input_size() const override { return lat_.L; }
  Index output_size() const override { return rows_ * lat_.N; }
  Eigen::VectorXcd forward(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd adjoint(const Eigen::VectorXcd& c) const override;
  /// Largest eigenvalue of the full frame operator, from its block structure.
  double norm_sq_bound() const override;

  const gabor::Window<double>& window() const { return g_; }
  const gabor::Lattice& lattice() const { return lat_; }
  gabor::CoefficientMode mode() const { return mode_; }

 private:
  gabor::Window<double> g_;
  gabor::Lattice lat_;
  gabor::CoefficientMode mode_;
  Index rows_;
};

/// Explicit complex matrix acting on real vectors.
class MatrixOperator final : public AnalysisOperator {
 public:
  explicit MatrixOperator(Eigen::MatrixXcd A) : A_(std::move(A)) {}

  Index input_size() const override { return A_.cols(); }
  Index output_size() const override { return A_.rows(); }
  Eigen::VectorXcd forward(const Eigen::VectorXd& x) const override {
    return A_ * x.cast<std::complex<double>>();
  }
  Eigen::VectorXd adjoint(const Eigen::VectorXcd& c) const override {
    return (A_.adjoint() * c).real();
  }

 private:
  Eigen::MatrixXcd A_;
};

/// Power iteration on Phi^T Phi, padded by 1%. Estimates ||Phi||^2 from below
/// before padding, so it is not a guaranteed bound.
double power_norm_sq(const AnalysisOperator& op, int max_iter = 60, double rel_tol = 1e-5);

/// Largest relative mismatch |Re<Phi u, w> - <u, Phi^T w>| / (||Phi u|| ||w||)
/// over seeded random probes.
double adjoint_mismatch(const AnalysisOperator& op, int probes = 3, std::uint64_t seed = 7);

/// 0.1 * max_i |(Phi v)_i|. Throws ZeroSignal if that is zero.
double smoothing_mu(const AnalysisOperator& op, const Eigen::VectorXd& v);

struct DenoiseProblem {
  Eigen::VectorXd y;
  std::shared_ptr<const AnalysisOperator> op;
  double mu = 1.0;
  double eta = 0.0;
  Eigen::VectorXd x0;  // empty means zero
};

enum class Algorithm { accelerated_primal_dual, reference_admm };

struct SolverConfig {
  int max_iter = 3000;
  double tol = 1e-7;
  Algorithm algorithm = Algorithm::accelerated_primal_dual;
  bool record_trace = false;
};

struct TraceEntry {
  int iteration;
  double objective;
  double best_objective;
  double feasibility;  // ||x - y|| - eta
};

struct SolverResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  double feasibility_violation = 0.0;  // max(0, ||x - y|| - eta)
  int iterations = 0;
  bool converged = false;
  std::vector<TraceEntry> trace;
};

/// ||Phi x||_1 + (mu/2) ||x - x0||^2
double objective(const DenoiseProblem& p, const Eigen::VectorXd& x);

/// Euclidean projection onto {x : ||x - y|| <= eta}.
Eigen::VectorXd project_ball(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double eta);

/// Accelerated primal-dual iteration on the saddle form (the primal is
/// mu-strongly convex, so step sizes shrink as 1/k). Every primal iterate is
/// feasible; the best one seen is returned. Convergence is declared once the
/// relative objective change stays below cfg.tol for 10 consecutive iterations.
/// A run that hits max_iter comes back with converged = false.
SolverResult solve_abpdn(const DenoiseProblem& p, const SolverConfig& cfg = {});

/// ADMM with splits w = Phi x and v = x, solving the x-step with a dense
/// Cholesky factorization of mu I + rho (Phi^T Phi + I). Desk scale only
/// (L <= 2000). Stops when primal and dual residuals are both <= cfg.tol.
SolverResult solve_reference_admm(const DenoiseProblem& p, const SolverConfig& cfg);

/// Dispatches on cfg.algorithm.
SolverResult solve(const DenoiseProblem& p, const SolverConfig& cfg = {});

/// Writes iteration,objective,best_objective,feasibility.
void write_trace_csv(const std::string& path, const std::vector<TraceEntry>& trace);

}  // namespace stardgt::solver
