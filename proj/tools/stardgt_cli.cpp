#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stardgt/error.hpp"
#include "stardgt/gabor.hpp"
#include "stardgt/harness.hpp"
#include "stardgt/noise.hpp"
#include "stardgt/report.hpp"
#include "stardgt/ringmod.hpp"
#include "stardgt/solver.hpp"
#include "stardgt/wav.hpp"
#include "stardgt/zauner.hpp"

using namespace stardgt;
using Index = Eigen::Index;

namespace {

constexpr int kExitOk = 0, kExitUsage = 1, kExitNumerical = 2;

// Options shared by the commands that run the solver.
struct RunOptions {
  std::string input;
  std::string mode = "relaxed";
  std::uint64_t prime_cap = 23;
  Index forced_L = 0;
  bool replication = false;
  std::vector<std::string> windows{"gauss", "hann", "hamming", "star"};
  std::vector<std::string> noises{"gaussian"};
  int trials = 1;
  std::uint64_t seed = 1;
  std::uint64_t star_seed = 1;
  double eta = -1.0;
  std::string mu_from = "clean";
  bool full = false;
  bool mse_raw = false;
  int max_iter = 3000;
  double tol = 1e-7;
  std::string algorithm = "primal-dual";
  std::string cache;
  std::vector<std::string> outputs;
};

void add_run_options(CLI::App* c, RunOptions& o) {
  c->add_option("--in", o.input, "Mono 16-bit PCM WAV")->required()->check(CLI::ExistingFile);
  c->add_option("--mode", o.mode, "Admissibility mode")->check(CLI::IsMember({"strict", "relaxed"}));
  c->add_option("--prime-cap", o.prime_cap, "Largest prime factor allowed in L");
  c->add_option("--L", o.forced_L, "Force the artificial dimension");
  c->add_flag("--replication", o.replication, "Force L from the replication table");
  c->add_option("--windows", o.windows, "Window kinds")->delimiter(',');
  c->add_option("--noises", o.noises, "Noise kinds")->delimiter(',');
  c->add_option("--trials", o.trials)->check(CLI::PositiveNumber);
  c->add_option("--seed", o.seed, "Base seed for noise");
  c->add_option("--star-seed", o.star_seed, "Seed of the star window start vector");
  c->add_option("--eta", o.eta, "Fixed BPDN radius (default: realized noise norm)");
  c->add_option("--mu-from", o.mu_from)->check(CLI::IsMember({"clean", "observed"}));
  c->add_flag("--full", o.full, "Use all M frequencies instead of the real half");
  c->add_flag("--mse-raw", o.mse_raw, "Report ||x - xhat||^2 without the 1/L");
  c->add_option("--max-iter", o.max_iter)->check(CLI::PositiveNumber);
  c->add_option("--tol", o.tol)->check(CLI::PositiveNumber);
  c->add_option("--algorithm", o.algorithm)->check(CLI::IsMember({"primal-dual", "admm"}));
  c->add_option("--window-cache", o.cache, "Directory for cached star windows");
  c->add_option("-o,--out", o.outputs, "Report files (.csv, .json, .svg)");
}

harness::ExperimentConfig to_config(const RunOptions& o) {
  harness::ExperimentConfig cfg;
  cfg.windows.clear();
  for (const auto& w : o.windows) cfg.windows.push_back(gabor::window_kind_from_string(w));
  cfg.noises.clear();
  for (const auto& n : o.noises) cfg.noises.push_back(noise::noise_kind_from_string(n));
  cfg.trials = o.trials;
  cfg.base_seed = o.seed;
  if (o.eta >= 0.0) cfg.eta = o.eta;
  cfg.mu_from = o.mu_from == "clean" ? harness::MuSource::clean : harness::MuSource::observed;
  cfg.coefficients = o.full ? gabor::CoefficientMode::full : gabor::CoefficientMode::real;
  cfg.mse_norm = o.mse_raw ? harness::MseNormalization::raw : harness::MseNormalization::per_sample;
  cfg.admissibility = ringmod::admissibility_mode_from_string(o.mode);
  cfg.solver.max_iter = o.max_iter;
  cfg.solver.tol = o.tol;
  cfg.solver.algorithm = o.algorithm == "admm" ? solver::Algorithm::reference_admm
                                               : solver::Algorithm::accelerated_primal_dual;
  cfg.star.seed = o.star_seed;
  cfg.star.mode = cfg.admissibility;
  if (!o.cache.empty()) cfg.window_cache = o.cache;
  return cfg;
}

harness::SignalRecord load_signal(const RunOptions& o) {
  const harness::SignalRecord raw = harness::load_wav(o.input);
  std::optional<Index> forced;
  if (o.forced_L > 0) forced = o.forced_L;
  if (o.replication) {
    forced = harness::replication_dimension(raw.true_dim);
    if (!forced) throw InputError("no replication dimension for a signal of " + std::to_string(raw.true_dim) + " samples");
  }
  harness::SignalRecord s =
      harness::truncate_to_admissible(raw, ringmod::admissibility_mode_from_string(o.mode), o.prime_cap, forced);
  std::cerr << "signal " << s.label << ": " << s.true_dim << " samples, L = " << s.artificial_dim
            << " (" << ringmod::factorize(static_cast<std::uint64_t>(s.artificial_dim)).to_string() << ")\n";
  return s;
}

void write_reports(const harness::ExperimentReport& r, const std::vector<std::string>& outputs) {
  if (outputs.empty()) {
    std::cout << report::to_csv(r);
    return;
  }
  for (const auto& out : outputs) {
    report::emit_report(r, report::format_from_path(out), out);
    std::cerr << "wrote " << out << "\n";
  }
}

void warn_unconverged(const harness::ExperimentReport& r) {
  std::size_t bad = 0;
  for (const auto& rec : r.records) bad += rec.converged ? 0 : 1;
  if (bad) std::cerr << "warning: " << bad << " record(s) hit the iteration cap before the tolerance\n";
}

std::vector<std::pair<Index, Index>> parse_pairs(const std::vector<std::string>& raw) {
  std::vector<std::pair<Index, Index>> out;
  for (const auto& p : raw) {
    const auto x = p.find('x');
    if (x == std::string::npos) throw InputError("lattice pair '" + p + "' is not of the form AxB");
    try {
      out.emplace_back(std::stol(p.substr(0, x)), std::stol(p.substr(x + 1)));
    } catch (const std::exception&) {
      throw InputError("lattice pair '" + p + "' is not of the form AxB");
    }
  }
  return out;
}

// Turns {"key": value} into "--key value" tokens. Arrays are comma joined,
// booleans become bare flags.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config must be a JSON object");
  auto scalar = [](const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
  };
  std::vector<std::string> tokens;
  for (const auto& [key, v] : j.items()) {
    const std::string flag = (key == "o" ? "-" : "--") + key;
    if (v.is_boolean()) {
      if (v.get<bool>()) tokens.push_back(flag);
    } else if (v.is_array()) {
      std::string joined;
      for (const auto& e : v) joined += (joined.empty() ? "" : ",") + scalar(e);
      tokens.push_back(flag);
      tokens.push_back(joined);
    } else {
      tokens.push_back(flag);
      tokens.push_back(scalar(v));
    }
  }
  return tokens;
}

// Pulls "--config FILE" out of argv and splices the file's tokens in right
// after the subcommand names, so explicit flags (which come later) win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string cfg;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      cfg = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      cfg = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (cfg.empty()) return args;
  static const std::set<std::string> names{"check", "dims", "window", "dgt", "denoise",
                                           "bench", "sweep-sigma", "grid", "selftest"};
  std::size_t pos = 0;
  while (pos < args.size() && names.count(args[pos])) ++pos;
  const auto extra = config_tokens(cfg);
  args.insert(args.begin() + static_cast<long>(pos), extra.begin(), extra.end());
  return args;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Quick invariant pass over small dimensions. Returns the number of failures.
int selftest() {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "ok   " : "FAIL ") << name << "  " << detail << "\n";
    failures += ok ? 0 : 1;
  };
  std::ostringstream d;

  for (std::int64_t L : {3, 15, 21, 33, 105}) {
    const Eigen::MatrixXcd U = zauner::weil_unitary(zauner::zauner_matrix(L));
    const double defect = zauner::unitarity_defect(U);
    double cube = 1.0;
    try {
      cube = zauner::zauner_cube_phase(U).residual;
    } catch (const NumericalError&) {
    }
    const zauner::StarWindow w = zauner::star_window(L);
    d.str("");
    d << "defect " << defect << ", cube " << cube << ", eigen residual " << w.residual;
    report("zauner L=" + std::to_string(L), defect <= 1e-10 && cube <= 1e-8 && w.residual <= 1e-8 &&
                                                std::abs(w.g.norm() - 1.0) <= 1e-12, d.str());
  }

  {
    const gabor::Lattice lat = gabor::Lattice::make(105, 5, 7);
    const auto g = gabor::make_window(gabor::WindowKind::star, 105);
    const solver::GaborOperator op(g, lat, gabor::CoefficientMode::full);
    const double mis = solver::adjoint_mismatch(op);
    d.str("");
    d << "adjoint mismatch " << mis;
    report("dgt adjoint", mis <= 1e-10, d.str());

    const gabor::Lattice one = gabor::Lattice::make(15, 1, 1);
    const auto h = gabor::make_window(gabor::WindowKind::hann, 15);
    const gabor::FrameBounds fb = gabor::frame_bounds(h, one);
    d.str("");
    d << "bounds " << fb.c1 << " " << fb.c2;
    report("a=b=1 tight", std::abs(fb.c1 - 15) <= 1e-9 * 15 && std::abs(fb.c2 - 15) <= 1e-9 * 15, d.str());
  }

  {
    const Eigen::VectorXd e = noise::gen_noise({noise::NoiseKind::pink, 0.5, 3}, 4096);
    d.str("");
    d << "std " << noise::sample_std(e);
    report("pink scaling", std::abs(noise::sample_std(e) - 0.5) <= 1e-12, d.str());
  }

  {
    const Index L = 105;
    const Eigen::VectorXd x = harness::speech_like_fixture(16000, 1.0).segment(3000, L);
    const Eigen::VectorXd e = noise::gen_noise({noise::NoiseKind::gaussian, 0.001, 1}, L);
    auto op = std::make_shared<solver::GaborOperator>(gabor::make_window(gabor::WindowKind::star, L),
                                                      gabor::Lattice::make(L, 5, 7));
    const solver::DenoiseProblem p{x + e, op, solver::smoothing_mu(*op, x), e.norm(), Eigen::VectorXd::Zero(L)};
    const auto fast = solver::solve_abpdn(p);
    const auto ref = solver::solve_reference_admm(p, {.max_iter = 20000, .tol = 1e-9});
    const double rel = std::abs(fast.objective - ref.objective) / ref.objective;
    d.str("");
    d << "relative objective gap " << rel << ", feasibility " << fast.feasibility_violation;
    report("solver vs reference", rel <= 1e-3 && fast.feasibility_violation <= 1e-6, d.str());
  }
  return failures;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spark-deficient Gabor frames and analysis-sparsity denoising"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all");
  app.add_option("--config", "JSON file whose keys mirror the long flags");

  // check
  std::uint64_t check_L = 0;
  std::string check_mode = "strict";
  auto* check = app.add_subcommand("check", "Admissibility of a dimension");
  check->add_option("L", check_L)->required();
  check->add_option("--mode", check_mode)->check(CLI::IsMember({"strict", "relaxed"}));

  // dims
  std::uint64_t dims_T = 0, dims_cap = 23;
  std::size_t dims_top = 20;
  std::string dims_mode = "relaxed";
  auto* dims = app.add_subcommand("dims", "Largest admissible dimensions not above T");
  dims->add_option("T", dims_T)->required();
  dims->add_option("--prime-cap", dims_cap);
  dims->add_option("--top", dims_top);
  dims->add_option("--mode", dims_mode)->check(CLI::IsMember({"strict", "relaxed"}));

  // window
  std::string win_kind = "star", win_out, win_method = "projector", win_mode = "relaxed";
  Index win_L = 0;
  std::uint64_t win_seed = 1;
  double win_theta = 0.0;
  auto* window = app.add_subcommand("window", "Build a unit-norm window and save it");
  window->add_option("--kind", win_kind)->check(CLI::IsMember({"gauss", "hann", "hamming", "star"}));
  window->add_option("--L", win_L)->required();
  window->add_option("--seed", win_seed);
  window->add_option("--theta", win_theta);
  window->add_option("--method", win_method)->check(CLI::IsMember({"projector", "power"}));
  window->add_option("--mode", win_mode)->check(CLI::IsMember({"strict", "relaxed"}));
  window->add_option("-o,--out", win_out)->required();

  // dgt
  std::string dgt_in, dgt_window, dgt_out;
  Index dgt_a = 0, dgt_b = 0;
  bool dgt_real = false;
  auto* dgt = app.add_subcommand("dgt", "Gabor coefficients of a WAV file");
  dgt->add_option("--in", dgt_in)->required()->check(CLI::ExistingFile);
  dgt->add_option("--window", dgt_window, "Window file written by 'window'")->required()->check(CLI::ExistingFile);
  dgt->add_option("--a", dgt_a)->required();
  dgt->add_option("--b", dgt_b)->required();
  dgt->add_flag("--real", dgt_real, "Keep only the non-negative frequencies");
  dgt->add_option("-o,--out", dgt_out, ".csv or .svg")->required();

  // denoise
  RunOptions dn;
  std::string dn_window = "star", dn_noise = "gaussian", dn_out, dn_trace;
  Index dn_a = 0, dn_b = 0;
  double dn_sigma = 0.001;
  auto* denoise = app.add_subcommand("denoise", "Add noise to a WAV file and denoise it");
  add_run_options(denoise, dn);
  denoise->remove_option(denoise->get_option("--windows"));
  denoise->remove_option(denoise->get_option("--noises"));
  denoise->remove_option(denoise->get_option("--trials"));
  denoise->remove_option(denoise->get_option("-o"));
  denoise->add_option("--window", dn_window)->check(CLI::IsMember({"gauss", "hann", "hamming", "star"}));
  denoise->add_option("--noise", dn_noise)->check(CLI::IsMember({"gaussian", "pink", "blue"}));
  denoise->add_option("--a", dn_a)->required();
  denoise->add_option("--b", dn_b)->required();
  denoise->add_option("--sigma", dn_sigma)->check(CLI::NonNegativeNumber);
  denoise->add_option("--trace", dn_trace, "Write the solver trace as CSV");
  denoise->add_option("-o,--out", dn_out, "Denoised WAV")->required();

  auto* bench = app.add_subcommand("bench", "Experiment families");
  bench->require_subcommand(1);

  // bench sweep-sigma
  RunOptions sw;
  Index sw_a = 0, sw_b = 0;
  int sw_count = 100;
  double sw_min = 0.001, sw_max = 0.01;
  auto* sweep = bench->add_subcommand("sweep-sigma", "MSE against noise level at a fixed lattice");
  add_run_options(sweep, sw);
  sweep->add_option("--a", sw_a)->required();
  sweep->add_option("--b", sw_b)->required();
  sweep->add_option("--count", sw_count, "Number of sigma values")->check(CLI::PositiveNumber);
  sweep->add_option("--sigma-min", sw_min);
  sweep->add_option("--sigma-max", sw_max);

  // bench grid
  RunOptions gr;
  std::vector<std::string> gr_pairs{"15x15", "5x17", "7x19", "17x19", "21x21"};
  double gr_sigma = 0.001;
  bool gr_fast = false;
  auto* grid = bench->add_subcommand("grid", "MSE over lattice pairs at a fixed noise level");
  add_run_options(grid, gr);
  grid->add_option("--pairs", gr_pairs, "Lattice pairs as AxB")->delimiter(',');
  grid->add_option("--sigma", gr_sigma)->check(CLI::NonNegativeNumber);
  grid->add_option("--forced-L", gr.forced_L, "Same as --L");
  grid->add_flag("--fast", gr_fast, "Loose tolerance and an iteration cap, for smoke runs");

  auto* self = app.add_subcommand("selftest", "Run the invariant checks");

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (check->parsed()) {
      const auto mode = ringmod::admissibility_mode_from_string(check_mode);
      const auto adm = ringmod::check_admissible(check_L, mode);
      std::cout << check_L << " = " << ringmod::factorize(check_L).to_string() << ": "
                << (adm.admissible ? "admissible" : "not admissible") << " (" << check_mode << ")\n";
      for (const auto& r : adm.reasons) std::cout << "  " << r << "\n";
    } else if (dims->parsed()) {
      const auto mode = ringmod::admissibility_mode_from_string(dims_mode);
      std::cout << "L,factorization,divisors\n";
      for (const auto& c : ringmod::enumerate_dimensions(dims_T, mode, dims_cap, dims_top)) {
        std::cout << c.L << ',' << ringmod::factorize(c.L).to_string() << ',';
        for (std::size_t i = 0; i < c.divisors.size(); ++i) std::cout << (i ? " " : "") << c.divisors[i];
        std::cout << '\n';
      }
    } else if (window->parsed()) {
      zauner::StarWindowOptions opts;
      opts.seed = win_seed;
      opts.theta = win_theta;
      opts.method = zauner::eigen_method_from_string(win_method);
      opts.mode = ringmod::admissibility_mode_from_string(win_mode);
      const auto w = gabor::make_window(gabor::window_kind_from_string(win_kind), win_L, opts);
      zauner::save_window(win_out, w.values, win_kind == "star" ? win_seed : 0);
      std::cerr << "wrote " << win_kind << " window of length " << win_L << " to " << win_out << "\n";
    } else if (dgt->parsed()) {
      const auto loaded = zauner::load_window(dgt_window);
      const Index L = loaded.g.size();
      const auto sig = wav::read(dgt_in);
      if (sig.samples.size() < L)
        throw DimensionMismatch("signal has " + std::to_string(sig.samples.size()) +
                                " samples, window needs " + std::to_string(L));
      const gabor::Lattice lat = gabor::Lattice::make(L, dgt_a, dgt_b);
      gabor::Window<double> g{loaded.g, gabor::WindowKind::custom};
      const Eigen::VectorXd x = sig.samples.head(L);
      const auto c = dgt_real ? gabor::dgt_real<double>(x, g, lat)
                              : gabor::dgt<double>(Eigen::VectorXcd(x.cast<std::complex<double>>()), g, lat);
      const auto fmt = report::format_from_path(dgt_out);
      if (fmt == report::Format::json) throw InputError("dgt writes .csv or .svg");
      report::write_text(dgt_out, fmt == report::Format::csv ? report::coefficients_csv(c) : report::coefficients_svg(c));
      std::cerr << c.grid.rows() << " x " << c.grid.cols() << " coefficients, l1 norm "
                << gabor::l1_norm(c.grid) << "\n";
    } else if (denoise->parsed()) {
      dn.windows = {dn_window};
      dn.noises = {dn_noise};
      const auto cfg = to_config(dn);
      const auto s = load_signal(dn);
      const Index L = s.artificial_dim;
      const gabor::Lattice lat = gabor::Lattice::make(L, dn_a, dn_b);
      const auto kind = noise::noise_kind_from_string(dn_noise);
      const auto obs = harness::observe(s.samples, noise::gen_noise({kind, dn_sigma, dn.seed}, L));
      const double eta = cfg.eta.value_or(obs.e.norm());
      const auto g = harness::build_windows(cfg, L).front();
      auto scfg = cfg;
      scfg.solver.record_trace = !dn_trace.empty();
      const auto r = harness::denoise(cfg.mu_from == harness::MuSource::clean ? obs.x : obs.y, obs.y, g, lat, eta, scfg);
      if (!dn_trace.empty()) solver::write_trace_csv(dn_trace, r.trace);
      wav::write(dn_out, r.x, s.sample_rate);
      std::cout << "noisy mse    " << harness::mse(obs.x, obs.y, cfg.mse_norm) << "\n"
                << "denoised mse " << harness::mse(obs.x, r.x, cfg.mse_norm) << "\n"
                << "iterations   " << r.iterations << (r.converged ? "" : " (cap reached)") << "\n";
    } else if (sweep->parsed()) {
      const auto cfg = to_config(sw);
      const auto s = load_signal(sw);
      Eigen::VectorXd sigmas = Eigen::VectorXd::LinSpaced(sw_count, sw_min, sw_max);
      if (sw_count == 1) sigmas[0] = sw_min;
      if (sw_count == 100 && sw_min == 0.001 && sw_max == 0.01) sigmas = noise::sigma_sweep();
      const auto r = harness::run_sigma_sweep(s, gabor::Lattice::make(s.artificial_dim, sw_a, sw_b), cfg, sigmas);
      warn_unconverged(r);
      write_reports(r, sw.outputs);
    } else if (grid->parsed()) {
      auto cfg = to_config(gr);
      if (gr_fast) {
        cfg.solver.tol = std::max(cfg.solver.tol, 1e-4);
        cfg.solver.max_iter = std::min(cfg.solver.max_iter, 60);
        cfg.trials = 1;
      }
      const auto s = load_signal(gr);
      const auto r = harness::run_lattice_grid(s, parse_pairs(gr_pairs), gr_sigma, cfg);
      warn_unconverged(r);
      write_reports(r, gr.outputs);
    } else if (self->parsed()) {
      const int failures = selftest();
      std::cerr << "selftest: " << failures << " failure(s)\n";
      if (failures) return kExitNumerical;
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::cerr << "done in " << std::fixed << std::setprecision(1) << seconds_since(t0) << " s\n";
  return kExitOk;
}
