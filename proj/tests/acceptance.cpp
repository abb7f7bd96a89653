// Acceptance run: one PASS/FAIL line per criterion, measured against the
// stated tolerances and runtime budgets. Exit status is the number of FAILs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "stardgt/error.hpp"
#include "stardgt/gabor.hpp"
#include "stardgt/harness.hpp"
#include "stardgt/noise.hpp"
#include "stardgt/random.hpp"
#include "stardgt/solver.hpp"
#include "stardgt/wav.hpp"
#include "stardgt/zauner.hpp"

using namespace stardgt;
using Index = Eigen::Index;
using cd = std::complex<double>;

namespace {

const std::int64_t kDims[] = {3, 15, 21, 33, 105};

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs <= budget_s;
  const bool ok = o.pass && in_time;
  failures += ok ? 0 : 1;
  std::ostringstream t;
  t.precision(1);
  t << std::fixed << secs << " s / budget " << budget_s << " s" << (in_time ? "" : " EXCEEDED");
  std::cout << (ok ? "PASS" : "FAIL") << " [" << id << "] " << name << " | " << o.detail << " | "
            << t.str() << std::endl;
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

Eigen::VectorXcd random_unit(Index L, std::uint64_t seed) {
  GaussianStream rng(seed);
  Eigen::VectorXcd v(L);
  for (auto& z : v) z = {rng(), rng()};
  return v / v.norm();
}

// 1 ---------------------------------------------------------------------------
Outcome unitarity_and_cube() {
  double worst_u = 0, worst_cube = 0, worst_gamma = 0, worst_ref = 0;
  for (std::int64_t L : kDims) {
    const Eigen::MatrixXcd U = zauner::weil_unitary(zauner::zauner_matrix(L));
    worst_ref = std::max(worst_ref, (U - oracle::zauner_unitary(L)).cwiseAbs().maxCoeff());
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(L, L);
    worst_u = std::max(worst_u, (U * U.adjoint() - I).cwiseAbs().maxCoeff());
    const Eigen::MatrixXcd U3 = U * U * U;
    const cd gamma = U3.diagonal().mean();
    worst_cube = std::max(worst_cube, (U3 - gamma * I).cwiseAbs().maxCoeff());
    worst_gamma = std::max(worst_gamma, std::abs(std::abs(gamma) - 1.0));
  }
  return {worst_u <= 1e-10 && worst_cube <= 1e-8 && worst_gamma <= 1e-8 && worst_ref <= 1e-12,
          "max|UU^H-I| " + sci(worst_u) + ", max|U^3-gI| " + sci(worst_cube) + ", ||g|-1| " +
              sci(worst_gamma) + ", vs direct formula " + sci(worst_ref)};
}

// 2 ---------------------------------------------------------------------------
Outcome star_validity() {
  double worst_res = 0, worst_norm = 0;
  bool deterministic = true;
  for (std::int64_t L : kDims) {
    const zauner::StarWindow w = zauner::star_window(L, {.seed = 7});
    const Eigen::MatrixXcd U = oracle::zauner_unitary(L);
    const Eigen::VectorXcd Ug = U * w.g;
    worst_res = std::max(worst_res, (Ug - w.lambda * w.g).norm());
    worst_norm = std::max(worst_norm, std::abs(w.g.norm() - 1.0));
    deterministic = deterministic && zauner::star_window(L, {.seed = 7}).g == w.g;
  }
  return {worst_res <= 1e-8 && worst_norm <= 1e-12 && deterministic,
          "max ||Ug-lg|| " + sci(worst_res) + ", max |norm-1| " + sci(worst_norm) +
              (deterministic ? ", repeat runs identical" : ", NOT deterministic")};
}

// 3 ---------------------------------------------------------------------------
int dependent_triples(const Eigen::MatrixXcd& A, int* tested) {
  int dep = 0;
  *tested = 0;
  const Index P = A.cols();
  for (Index i = 0; i < P; ++i)
    for (Index j = i + 1; j < P; ++j)
      for (Index k = j + 1; k < P; ++k) {
        Eigen::Matrix3cd S;
        S << A.col(i), A.col(j), A.col(k);
        Eigen::JacobiSVD<Eigen::Matrix3cd> svd(S);
        const auto s = svd.singularValues();
        dep += s(2) < 1e-8 * s(0) ? 1 : 0;
        ++*tested;
      }
  return dep;
}

Outcome spark_separation() {
  const gabor::Lattice lat = gabor::Lattice::make(3, 1, 1);
  const Eigen::MatrixXcd star = oracle::atoms(gabor::make_window(gabor::WindowKind::star, 3).values, 1, 1);
  const Eigen::MatrixXcd rnd = oracle::atoms(random_unit(3, 2024), 1, 1);
  int tested_s = 0, tested_r = 0;
  const int dep_s = dependent_triples(star, &tested_s);
  const int dep_r = dependent_triples(rnd, &tested_r);
  const int spark_s = gabor::spark_oracle(gabor::gabor_system(gabor::make_window(gabor::WindowKind::star, 3), lat), 1000);
  const int spark_r = gabor::spark_oracle(rnd, 1000);
  const bool agree = spark_s == oracle::spark(star) && spark_r == oracle::spark(rnd);
  return {spark_s <= 3 && spark_r == 4 && tested_s == 84 && dep_s > 0 && dep_r == 0 && agree,
          "spark star " + std::to_string(spark_s) + " (" + std::to_string(dep_s) + "/" +
              std::to_string(tested_s) + " triples dependent), random " + std::to_string(spark_r) + " (" +
              std::to_string(dep_r) + "/" + std::to_string(tested_r) + ")"};
}

// 4 ---------------------------------------------------------------------------
Outcome transform_correctness() {
  std::mt19937_64 pick(4);
  const Index dims[] = {15, 21, 33, 45, 63, 99, 105, 135, 165, 189, 231, 255, 273, 315};
  double worst_dgt = 0, worst_adj = 0, worst_tight = 0;
  for (int t = 0; t < 20; ++t) {
    const Index L = dims[pick() % std::size(dims)];
    std::vector<std::pair<Index, Index>> pairs;
    for (Index a = 1; a <= L; ++a)
      for (Index b = 1; b <= L; ++b)
        if (L % a == 0 && L % b == 0 && a * b < L) pairs.emplace_back(a, b);
    const auto [a, b] = pairs[pick() % pairs.size()];
    const gabor::Lattice lat = gabor::Lattice::make(L, a, b);
    const gabor::Window<double> g{random_unit(L, 500 + t), gabor::WindowKind::custom};
    const Eigen::VectorXcd x = random_unit(L, 600 + t) * 3.0;
    const auto c = gabor::dgt<double>(x, g, lat).grid;
    const Eigen::MatrixXcd ref = oracle::naive_dgt(x, g.values, a, b);
    worst_dgt = std::max(worst_dgt, (c - ref).cwiseAbs().maxCoeff());

    GaussianStream rng(700 + t);
    Eigen::MatrixXcd d(lat.M, lat.N);
    for (Index i = 0; i < d.size(); ++i) d(i) = {rng(), rng()};
    const cd lhs = (c.array().conjugate() * d.array()).sum();
    const cd rhs = x.dot(gabor::idgt<double>({d, gabor::CoefficientMode::full}, g, lat));
    worst_adj = std::max(worst_adj, std::abs(lhs - rhs) / (x.norm() * d.norm()));
  }
  for (Index L : {3, 15, 105, 315}) {
    const gabor::Lattice one = gabor::Lattice::make(L, 1, 1);
    const gabor::Window<double> g{random_unit(L, 900 + L), gabor::WindowKind::custom};
    const Eigen::VectorXcd x = random_unit(L, 950 + L);
    const Eigen::VectorXcd Sx = gabor::idgt<double>(gabor::dgt<double>(x, g, one), g, one);
    worst_tight = std::max(worst_tight, (Sx - double(L) * x).norm() / double(L));
    if (L <= 105) {
      const Eigen::MatrixXcd S = oracle::frame_operator(g.values, 1, 1);
      worst_tight = std::max(worst_tight, (S - double(L) * Eigen::MatrixXcd::Identity(L, L)).cwiseAbs().maxCoeff() / double(L));
    }
  }
  return {worst_dgt <= 1e-10 && worst_adj <= 1e-10 && worst_tight <= 1e-9,
          "fast vs naive " + sci(worst_dgt) + " over 20 cases, adjoint rel " + sci(worst_adj) +
              ", tightness rel " + sci(worst_tight)};
}

// 5 ---------------------------------------------------------------------------
double oracle_objective(const solver::DenoiseProblem& p, const Eigen::VectorXd& x,
                        const gabor::Window<double>& g, Index a, Index b, Index rows) {
  const Eigen::MatrixXcd c = oracle::naive_dgt(x.cast<cd>(), g.values, a, b).topRows(rows);
  const Eigen::VectorXd x0 = p.x0.size() ? p.x0 : Eigen::VectorXd::Zero(x.size());
  return c.cwiseAbs().sum() + 0.5 * p.mu * (x - x0).squaredNorm();
}

Outcome solver_accuracy() {
  const Index L = 105, a = 5, b = 7;
  const auto g = gabor::make_window(gabor::WindowKind::star, L);
  const gabor::Lattice lat = gabor::Lattice::make(L, a, b);
  auto op = std::make_shared<solver::GaborOperator>(g, lat);
  const Index rows = gabor::coefficient_rows(lat, gabor::CoefficientMode::real);
  const Eigen::VectorXd x = harness::speech_like_fixture(16000, 1.0).segment(3000, L);
  double worst_gap = 0, worst_feas = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::VectorXd e = noise::gen_noise({noise::NoiseKind::gaussian, 0.001, seed}, L);
    const solver::DenoiseProblem p{x + e, op, solver::smoothing_mu(*op, x), e.norm(), Eigen::VectorXd::Zero(L)};
    const auto fast = solver::solve_abpdn(p);
    const auto ref = solver::solve_reference_admm(p, {.max_iter = 50000, .tol = 1e-10});
    const double f_fast = oracle_objective(p, fast.x, g, a, b, rows);
    const double f_ref = oracle_objective(p, ref.x, g, a, b, rows);
    worst_gap = std::max(worst_gap, std::abs(f_fast - f_ref) / f_ref);
    worst_feas = std::max(worst_feas, std::max(0.0, (fast.x - p.y).norm() - p.eta));
  }
  return {worst_gap <= 1e-3 && worst_feas <= 1e-6,
          "max rel objective gap " + sci(worst_gap) + ", max feasibility violation " + sci(worst_feas)};
}

// 6 ---------------------------------------------------------------------------
Outcome noise_spectra() {
  const Index L = Index(1) << 16;
  std::vector<double> pink, blue;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    pink.push_back(oracle::spectral_slope_db_per_decade(noise::gen_noise({noise::NoiseKind::pink, 1.0, seed}, L)));
    blue.push_back(oracle::spectral_slope_db_per_decade(noise::gen_noise({noise::NoiseKind::blue, 1.0, seed}, L)));
  }
  const double mp = oracle::median(pink), mb = oracle::median(blue);
  std::ostringstream d;
  d.precision(3);
  d << "median slope pink " << mp << " dB/dec, blue " << mb << " dB/dec";
  return {std::abs(mp + 10.0) <= 2.0 && std::abs(mb - 10.0) <= 2.0, d.str()};
}

// 7 ---------------------------------------------------------------------------
Outcome ordering() {
  const harness::SignalRecord raw = harness::load_wav(STARDGT_TEST_DATA "/speech_fixture.wav");
  const harness::SignalRecord s =
      harness::truncate_to_admissible(raw, ringmod::AdmissibilityMode::relaxed, 23, 4095);
  harness::ExperimentConfig cfg;
  cfg.noises = {noise::NoiseKind::gaussian, noise::NoiseKind::pink, noise::NoiseKind::blue};
  cfg.trials = 10;
  const harness::ExperimentReport r = harness::run_lattice_grid(s, {{21, 13}}, 0.001, cfg);

  std::map<std::string, std::map<std::string, double>> med;  // noise -> window -> median
  bool converged = true;
  for (const auto& rec : r.records) {
    med[rec.noise][rec.window] = oracle::median(rec.trial_mse);
    converged = converged && rec.converged;
  }
  bool ok = converged;
  std::ostringstream d;
  for (const auto& [kind, by_window] : med) {
    const double star = by_window.at("star");
    bool below = true;
    for (const auto& [w, m] : by_window)
      if (w != "star") below = below && star < m;
    ok = ok && below;
    d << kind << ":";
    for (const auto& [w, m] : by_window) d << " " << w << "=" << sci(m);
    d << (below ? " (star lowest); " : " (star not lowest); ");
  }
  if (!converged) d << "some solves hit the iteration cap";
  return {ok, d.str()};
}

// 8 ---------------------------------------------------------------------------
std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

Outcome replication_plumbing() {
  const auto dir = std::filesystem::temp_directory_path() / "stardgt_acceptance";
  std::filesystem::create_directories(dir);
  const auto in = dir / "clip.wav", csv = dir / "grid.csv", js = dir / "grid.json";
  std::filesystem::remove(csv);
  std::filesystem::remove(js);
  wav::write(in, harness::speech_like_fixture(16000, 2.5), 16000);

  const std::string cmd = std::string("\"") + STARDGT_CLI + "\" bench grid --in \"" + in.string() +
                          "\" --forced-L 33915 --pairs 15x15,5x17,7x19,17x19,21x21 --fast -o \"" +
                          csv.string() + "\" -o \"" + js.string() + "\" 2>\"" + (dir / "cli.log").string() + "\"";
  const int rc = std::system(cmd.c_str());
  if (rc != 0) return {false, "CLI exit status " + std::to_string(rc)};

  std::ifstream is(csv);
  std::string header;
  std::getline(is, header);
  std::map<std::string, std::set<std::string>> cells;
  bool finite = true;
  int rows = 0;
  for (std::string line; std::getline(is, line);) {
    const auto f = split(line);
    if (f.size() != 8) return {false, "malformed row: " + line};
    ++rows;
    cells[f[1]].insert(f[4] + "x" + f[5]);
    const double m = std::stod(f[7]);
    finite = finite && std::isfinite(m) && m >= 0;
  }
  bool complete = cells.size() == 4;
  for (const auto& [w, pairs] : cells) complete = complete && pairs.size() == 5;

  nlohmann::json j;
  std::ifstream(js) >> j;
  int unconverged = 0;
  Index L = 0;
  for (const auto& rec : j.at("records")) {
    unconverged += rec.at("converged").get<bool>() ? 0 : 1;
    L = rec.at("L").get<Index>();
  }
  return {header == "signal,window,noise,sigma,a,b,trials,mse" && rows == 20 && complete && finite &&
              unconverged == 0 && L == 33915,
          "L " + std::to_string(L) + ", " + std::to_string(rows) + " rows, " + std::to_string(cells.size()) +
              " windows x 5 pairs " + (complete ? "complete" : "INCOMPLETE") + ", " +
              (finite ? "all MSE finite" : "non-finite MSE") + ", " + std::to_string(unconverged) +
              " unconverged"};
}

}  // namespace

int main() {
  run(1, "unitarity and cube law", 30, unitarity_and_cube);
  run(2, "star window validity", 30, star_validity);
  run(3, "spark separation at L=3", 1, spark_separation);
  run(4, "transform correctness", 60, transform_correctness);
  run(5, "solver endpoint accuracy", 120, solver_accuracy);
  run(6, "noise spectra", 10, noise_spectra);
  run(7, "ordering regression at L=4095", 600, ordering);
  run(8, "replication grid plumbing (--fast)", 600, replication_plumbing);
  std::cout << failures << " of 8 criteria failed" << std::endl;
  return failures;
}
