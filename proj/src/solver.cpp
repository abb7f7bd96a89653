#include "stardgt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "stardgt/error.hpp"
#include "stardgt/random.hpp"

namespace stardgt::solver {

namespace {

Eigen::VectorXd random_real(Index n, GaussianStream& rng) {
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng();
  return v;
}

Eigen::VectorXcd random_complex(Index n, GaussianStream& rng) {
  Eigen::VectorXcd v(n);
  for (Index i = 0; i < n; ++i) {
    const double re = rng();
    v[i] = {re, rng()};
  }
  return v;
}

double real_inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return a.dot(b).real();
}

/// Entrywise projection onto {|z_i| <= 1}.
void clip_unit_modulus(Eigen::VectorXcd& z) {
  for (Index i = 0; i < z.size(); ++i) {
    const double m = std::abs(z[i]);
    if (m > 1.0) z[i] /= m;
  }
}

/// Complex soft thresholding: shrink moduli by t, keep phases.
Eigen::VectorXcd soft_threshold(const Eigen::VectorXcd& v, double t) {
  Eigen::VectorXcd out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v[i]);
    out[i] = m > t ? v[i] * ((m - t) / m) : std::complex<double>(0.0);
  }
  return out;
}

void validate(const DenoiseProblem& p) {
  if (!p.op) throw InputError("denoise problem has no analysis operator");
  if (!(p.mu > 0.0)) throw InputError("mu must be positive");
  if (!(p.eta >= 0.0)) throw InputError("eta must be nonnegative");
  if (p.y.size() != p.op->input_size())
    throw DimensionMismatch("observation length does not match operator input size");
  if (p.x0.size() != 0 && p.x0.size() != p.y.size())
    throw DimensionMismatch("x0 length does not match observation length");
}

Eigen::VectorXd initial_guess(const DenoiseProblem& p) {
  return p.x0.size() ? p.x0 : Eigen::VectorXd::Zero(p.y.size());
}

void check_wiring(const AnalysisOperator& op) {
  const double mismatch = adjoint_mismatch(op);
  if (mismatch > 1e-8) {
    throw NumericalError("analysis operator fails the adjoint test (relative mismatch " +
                         std::to_string(mismatch) + ")");
  }
}

SolverResult finished(const DenoiseProblem& p, Eigen::VectorXd x, int iterations, bool converged,
                      std::vector<TraceEntry> trace = {}) {
  SolverResult r;
  r.objective = objective(p, x);
  r.feasibility_violation = std::max(0.0, (x - p.y).norm() - p.eta);
  r.x = std::move(x);
  r.iterations = iterations;
  r.converged = converged;
  r.trace = std::move(trace);
  return r;
}

/// Shortcuts shared by both algorithms. Returns true and fills `out` when the
/// answer is known without iterating.
bool trivial_solution(const DenoiseProblem& p, const Eigen::VectorXd& x0, SolverResult& out) {
  if (p.eta == 0.0) {
    out = finished(p, p.y, 0, true);
    return true;
  }
  // x0 minimizes both terms; if it is feasible it is the answer.
  if ((x0 - p.y).norm() <= p.eta && p.op->forward(x0).cwiseAbs().maxCoeff() == 0.0) {
    out = finished(p, x0, 0, true);
    return true;
  }
  return false;
}

}  // namespace

double AnalysisOperator::norm_sq_bound() const { return 1.05 * power_norm_sq(*this); }

double power_norm_sq(const AnalysisOperator& op, int max_iter, double rel_tol) {
  GaussianStream rng(11);
  Eigen::VectorXd v = random_real(op.input_size(), rng).normalized();
  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = op.adjoint(op.forward(v));
    const double nw = w.norm();
    if (nw == 0.0) return 1.0;
    const double prev = est;
    est = nw;
    v = w / nw;
    if (it > 5 && std::abs(est - prev) <= rel_tol * est) break;
  }
  return 1.01 * est;
}

GaborOperator::GaborOperator(gabor::Window<double> g, gabor::Lattice lat,
                             gabor::CoefficientMode mode)
    : g_(std::move(g)), lat_(lat), mode_(mode), rows_(gabor::coefficient_rows(lat, mode)) {
  if (g_.size() != lat_.L) throw DimensionMismatch("window length does not match lattice");
}

Eigen::VectorXcd GaborOperator::forward(const Eigen::VectorXd& x) const {
  if (x.size() != lat_.L) throw DimensionMismatch("signal length does not match lattice");
  Eigen::MatrixXcd grid = gabor::detail::analysis<double>(x, g_.values, lat_, rows_);
  return Eigen::Map<const Eigen::VectorXcd>(grid.data(), grid.size());
}

Eigen::VectorXd GaborOperator::adjoint(const Eigen::VectorXcd& c) const {
  if (c.size() != output_size()) throw DimensionMismatch("coefficient vector has wrong size");
  const Eigen::Map<const Eigen::MatrixXcd> grid(c.data(), rows_, lat_.N);
  return gabor::detail::synthesis<double>(grid, g_.values, lat_).real();
}

double GaborOperator::norm_sq_bound() const {
  // Walnut form: (Sx)(l) = M sum_k G_k(l) x(l - kM) with
  // G_k(l) = sum_n g(l - na) conj(g(l - kM - na)), which has period a in l.
  // S only couples indices in the same coset of M Z_L, so it splits into M
  // Hermitian b x b blocks. The positive-frequency operator is bounded by the
  // full one.
  const Index L = lat_.L, M = lat_.M, a = lat_.a, b = lat_.b;
  const auto& g = g_.values;
  auto at = [&](Index i) { return g[((i % L) + L) % L]; };
  Eigen::MatrixXcd G(a, b);
  for (Index l = 0; l < a; ++l)
    for (Index k = 0; k < b; ++k) {
      std::complex<double> acc = 0.0;
      for (Index n = 0; n < lat_.N; ++n) acc += at(l - n * a) * std::conj(at(l - k * M - n * a));
      G(l, k) = acc;
    }
  Eigen::MatrixXcd block(b, b);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
  double top = 0.0;
  for (Index j = 0; j < M; ++j) {
    for (Index r = 0; r < b; ++r)
      for (Index s = 0; s < b; ++s) block(r, s) = G((j + r * M) % a, ((r - s) % b + b) % b);
    es.compute(block, Eigen::EigenvaluesOnly);
    top = std::max(top, es.eigenvalues()[b - 1]);
  }
  // pad against rounding in the eigensolver
  return static_cast<double>(M) * top * (1.0 + 1e-10);
}

double adjoint_mismatch(const AnalysisOperator& op, int probes, std::uint64_t seed) {
  GaussianStream rng(seed);
  double worst = 0.0;
  for (int i = 0; i < probes; ++i) {
    const Eigen::VectorXd u = random_real(op.input_size(), rng);
    const Eigen::VectorXcd w = random_complex(op.output_size(), rng);
    const Eigen::VectorXcd Pu = op.forward(u);
    const double lhs = real_inner(Pu, w);
    const double rhs = u.dot(op.adjoint(w));
    const double scale = Pu.norm() * w.norm();
    if (scale > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

double smoothing_mu(const AnalysisOperator& op, const Eigen::VectorXd& v) {
  if (v.size() != op.input_size()) throw DimensionMismatch("signal length does not match operator");
  const double peak = v.size() ? op.forward(v).cwiseAbs().maxCoeff() : 0.0;
  if (!(peak > 0.0)) throw ZeroSignal("cannot derive mu from a signal with zero coefficients");
  return 0.1 * peak;
}

double objective(const DenoiseProblem& p, const Eigen::VectorXd& x) {
  const double l1 = p.op->forward(x).cwiseAbs().sum();
  const double d = p.x0.size() ? (x - p.x0).squaredNorm() : x.squaredNorm();
  return l1 + 0.5 * p.mu * d;
}

Eigen::VectorXd project_ball(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double eta) {
  const Eigen::VectorXd d = x - y;
  const double n = d.norm();
  if (n <= eta) return x;
  if (eta == 0.0) return y;
  return y + (eta / n) * d;
}

SolverResult solve_abpdn(const DenoiseProblem& p, const SolverConfig& cfg) {
  validate(p);
  if (cfg.max_iter < 1 || !(cfg.tol > 0.0)) throw InputError("invalid solver configuration");
  const AnalysisOperator& op = *p.op;
  const Eigen::VectorXd x0 = initial_guess(p);
  SolverResult trivial;
  if (trivial_solution(p, x0, trivial)) return trivial;
  check_wiring(op);

  // Saddle form: min_x max_{|z_i| <= 1} Re<z, Phi x> + (mu/2)||x - x0||^2 + i_ball(x).
  // The x part is mu-strongly convex, so the steps can be accelerated.
  const double lip = op.norm_sq_bound();
  // balance the primal step against the ball radius and the dual box size
  double tau = p.eta / std::sqrt(static_cast<double>(op.output_size()) * lip);
  double sigma = 1.0 / (lip * tau);

  Eigen::VectorXd x = project_ball(x0, p.y, p.eta);
  Eigen::VectorXcd Px = op.forward(x);
  Eigen::VectorXcd Pxb = Px;
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(op.output_size());

  Eigen::VectorXd best_x = x;
  double best = Px.cwiseAbs().sum() + 0.5 * p.mu * (x - x0).squaredNorm();
  double prev = best;
  int calm = 0;
  std::vector<TraceEntry> trace;
  if (cfg.record_trace) trace.push_back({0, best, best, (x - p.y).norm() - p.eta});
  int it = 0;
  bool converged = false;
  for (; it < cfg.max_iter; ++it) {
    z += sigma * Pxb;
    clip_unit_modulus(z);
    const Eigen::VectorXd v = x - tau * op.adjoint(z);
    Eigen::VectorXd xn = project_ball((v + (tau * p.mu) * x0) / (1.0 + tau * p.mu), p.y, p.eta);
    const Eigen::VectorXcd Pxn = op.forward(xn);

    const double theta = 1.0 / std::sqrt(1.0 + p.mu * tau);
    tau *= theta;
    sigma /= theta;
    Pxb = Pxn + theta * (Pxn - Px);  // Phi of the extrapolated point, by linearity
    x = std::move(xn);
    Px = Pxn;

    const double f = Px.cwiseAbs().sum() + 0.5 * p.mu * (x - x0).squaredNorm();
    if (f < best) {
      best = f;
      best_x = x;
    }
    if (cfg.record_trace) trace.push_back({it + 1, f, best, (x - p.y).norm() - p.eta});

    if (std::abs(f - prev) <= cfg.tol * std::max(std::abs(f), 1e-300)) {
      if (++calm >= 10) {
        converged = true;
        ++it;
        break;
      }
    } else {
      calm = 0;
    }
    prev = f;
  }
  return finished(p, std::move(best_x), it, converged, std::move(trace));
}

SolverResult solve_reference_admm(const DenoiseProblem& p, const SolverConfig& cfg) {
  validate(p);
  if (cfg.max_iter < 1 || !(cfg.tol > 0.0)) throw InputError("invalid solver configuration");
  const AnalysisOperator& op = *p.op;
  const Index L = op.input_size();
  if (L > 2000) throw TooLarge("reference ADMM is limited to L <= 2000");
  const Eigen::VectorXd x0 = initial_guess(p);
  SolverResult trivial;
  if (trivial_solution(p, x0, trivial)) return trivial;
  check_wiring(op);

  // Phi^T Phi, column by column
  Eigen::MatrixXd gram(L, L);
  for (Index j = 0; j < L; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(L);
    e[j] = 1.0;
    gram.col(j) = op.adjoint(op.forward(e));
  }
  gram = 0.5 * (gram + gram.transpose()).eval();

  double rho = p.mu;
  auto factor = [&](double r) {
    Eigen::MatrixXd A = r * gram;
    A.diagonal().array() += p.mu + r;
    return Eigen::LLT<Eigen::MatrixXd>(A);
  };
  Eigen::LLT<Eigen::MatrixXd> llt = factor(rho);

  Eigen::VectorXd x = project_ball(x0, p.y, p.eta);
  Eigen::VectorXd v = x;
  Eigen::VectorXcd w = op.forward(x);
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(w.size());  // scaled dual of w = Phi x
  Eigen::VectorXd s = Eigen::VectorXd::Zero(L);           // scaled dual of v = x

  std::vector<TraceEntry> trace;
  bool converged = false;
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    const Eigen::VectorXd rhs = p.mu * x0 + rho * op.adjoint(w - u) + rho * (v - s);
    x = llt.solve(rhs);
    const Eigen::VectorXcd Px = op.forward(x);
    const Eigen::VectorXcd w_old = w;
    const Eigen::VectorXd v_old = v;
    w = soft_threshold(Px + u, 1.0 / rho);
    v = project_ball(x + s, p.y, p.eta);
    u += Px - w;
    s += x - v;

    const double r_pri = std::sqrt((Px - w).squaredNorm() + (x - v).squaredNorm());
    const double r_dual =
        rho * std::sqrt(op.adjoint(w - w_old).squaredNorm() + (v - v_old).squaredNorm());
    if (cfg.record_trace) {
      const double f = objective(p, v);
      const double best = trace.empty() ? f : std::min(f, trace.back().best_objective);
      trace.push_back({it, f, best, (v - p.y).norm() - p.eta});
    }
    if (r_pri <= cfg.tol && r_dual <= cfg.tol) {
      converged = true;
      ++it;
      break;
    }
    // residual balancing
    if (it % 25 == 24) {
      double scale = 1.0;
      if (r_pri > 10.0 * r_dual) scale = 2.0;
      else if (r_dual > 10.0 * r_pri) scale = 0.5;
      if (scale != 1.0) {
        rho *= scale;
        u /= scale;
        s /= scale;
        llt = factor(rho);
      }
    }
  }
  return finished(p, std::move(v), it, converged, std::move(trace));
}

SolverResult solve(const DenoiseProblem& p, const SolverConfig& cfg) {
  return cfg.algorithm == Algorithm::reference_admm ? solve_reference_admm(p, cfg)
                                                    : solve_abpdn(p, cfg);
}

void write_trace_csv(const std::string& path, const std::vector<TraceEntry>& trace) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << "iteration,objective,best_objective,feasibility\n";
  os.precision(17);
  for (const auto& t : trace)
    os << t.iteration << ',' << t.objective << ',' << t.best_objective << ',' << t.feasibility
       << '\n';
}

}  // namespace stardgt::solver
