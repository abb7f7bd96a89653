#include "stardgt/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "stardgt/error.hpp"

namespace stardgt::report {

using harness::ExperimentRecord;
using harness::ExperimentReport;
using json = nlohmann::json;

Format format_from_path(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".csv") return Format::csv;
  if (ext == ".json") return Format::json;
  if (ext == ".svg") return Format::svg;
  throw InputError("cannot infer report format from '" + p.string() + "'");
}

std::string to_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << "signal,window,noise,sigma,a,b,trials,mse\n";
  os << std::setprecision(17);
  for (const auto& rec : r.records)
    os << rec.signal << ',' << rec.window << ',' << rec.noise << ',' << rec.sigma << ',' << rec.a
       << ',' << rec.b << ',' << rec.trials << ',' << rec.mse << '\n';
  return os.str();
}

std::string to_json(const ExperimentReport& r) {
  const auto& m = r.metadata;
  json meta = {{"admissibility_mode", m.admissibility_mode},
               {"coefficient_mode", m.coefficient_mode},
               {"eta_rule", m.eta_rule},
               {"mu_rule", m.mu_rule},
               {"rng", m.rng},
               {"mse_normalization", m.mse_normalization},
               {"solver", m.solver},
               {"star_seed", m.star_seed},
               {"seeds", m.seeds}};
  json records = json::array();
  for (const auto& rec : r.records) {
    records.push_back({{"signal", rec.signal},
                       {"window", rec.window},
                       {"noise", rec.noise},
                       {"sigma", rec.sigma},
                       {"L", rec.L},
                       {"a", rec.a},
                       {"b", rec.b},
                       {"trials", rec.trials},
                       {"mse", rec.mse},
                       {"trial_mse", rec.trial_mse},
                       {"converged", rec.converged}});
  }
  return json{{"metadata", meta}, {"records", records}}.dump(2);
}

ExperimentReport from_json(const std::string& text) {
  ExperimentReport r;
  try {
    const json j = json::parse(text);
    const json& meta = j.at("metadata");
    auto& m = r.metadata;
    meta.at("admissibility_mode").get_to(m.admissibility_mode);
    meta.at("coefficient_mode").get_to(m.coefficient_mode);
    meta.at("eta_rule").get_to(m.eta_rule);
    meta.at("mu_rule").get_to(m.mu_rule);
    meta.at("rng").get_to(m.rng);
    meta.at("mse_normalization").get_to(m.mse_normalization);
    meta.at("solver").get_to(m.solver);
    meta.at("star_seed").get_to(m.star_seed);
    meta.at("seeds").get_to(m.seeds);
    for (const json& jr : j.at("records")) {
      ExperimentRecord rec;
      jr.at("signal").get_to(rec.signal);
      jr.at("window").get_to(rec.window);
      jr.at("noise").get_to(rec.noise);
      jr.at("sigma").get_to(rec.sigma);
      jr.at("L").get_to(rec.L);
      jr.at("a").get_to(rec.a);
      jr.at("b").get_to(rec.b);
      jr.at("trials").get_to(rec.trials);
      jr.at("mse").get_to(rec.mse);
      jr.at("trial_mse").get_to(rec.trial_mse);
      jr.at("converged").get_to(rec.converged);
      r.records.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed report JSON: ") + e.what());
  }
  return r;
}

namespace {

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

struct Panel {
  std::string title;
  std::vector<std::string> x_labels;  // empty: numeric sigma axis
  // window -> (x, mse) points
  std::map<std::string, std::vector<std::pair<double, double>>> series;
};

std::vector<Panel> panels_of(const ExperimentReport& r) {
  std::set<double> sigmas;
  for (const auto& rec : r.records) sigmas.insert(rec.sigma);
  const bool vs_sigma = sigmas.size() > 1;

  std::map<std::string, Panel> panels;
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<long, long>>> pair_order;
  for (const auto& rec : r.records) {
    std::string key = rec.signal + " / " + rec.noise;
    if (vs_sigma) key += " / (a,b)=(" + std::to_string(rec.a) + "," + std::to_string(rec.b) + ")";
    else key += " / sigma=" + fmt(rec.sigma);
    if (!panels.count(key)) {
      panels[key].title = key;
      order.push_back(key);
    }
    Panel& p = panels[key];
    double x = rec.sigma;
    if (!vs_sigma) {
      auto& pairs = pair_order[key];
      const std::pair<long, long> ab{rec.a, rec.b};
      auto it = std::find(pairs.begin(), pairs.end(), ab);
      if (it == pairs.end()) {
        pairs.push_back(ab);
        p.x_labels.push_back("(" + std::to_string(rec.a) + "," + std::to_string(rec.b) + ")");
        it = pairs.end() - 1;
      }
      x = static_cast<double>(it - pairs.begin());
    }
    p.series[rec.window].emplace_back(x, rec.mse);
  }
  std::vector<Panel> out;
  for (const auto& k : order) out.push_back(std::move(panels[k]));
  return out;
}

}  // namespace

std::string to_svg(const ExperimentReport& r) {
  const auto panels = panels_of(r);
  constexpr double W = 720, H = 360, left = 80, right = 140, top = 40, bottom = 50;
  std::ostringstream os;
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
     << H * static_cast<double>(panels.size()) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& p = panels[pi];
    const double y0 = H * static_cast<double>(pi);
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& [w, pts] : p.series)
      for (const auto& [x, y] : pts) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        if (y > 0) {
          ymin = std::min(ymin, y);
          ymax = std::max(ymax, y);
        }
      }
    if (xmax <= xmin) xmax = xmin + 1;
    if (!(ymax > 0)) ymin = ymax = 1.0;
    double lymin = std::floor(std::log10(ymin) * 10) / 10, lymax = std::ceil(std::log10(ymax) * 10) / 10;
    if (lymax <= lymin) lymax = lymin + 0.1;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (W - left - right); };
    auto sy = [&](double y) {
      const double ly = std::log10(std::max(y, 1e-300));
      return y0 + top + (lymax - ly) / (lymax - lymin) * (H - top - bottom);
    };
    os << "<g class=\"panel\">\n";
    os << "<text x=\"" << left << "\" y=\"" << y0 + 20 << "\">" << p.title << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << y0 + top << "\" width=\"" << W - left - right
       << "\" height=\"" << H - top - bottom << "\" fill=\"none\" stroke=\"#888\"/>\n";
    os << "<text x=\"10\" y=\"" << y0 + top + 10 << "\">1e" << fmt(lymax) << "</text>\n";
    os << "<text x=\"10\" y=\"" << y0 + H - bottom << "\">1e" << fmt(lymin) << "</text>\n";
    if (p.x_labels.empty()) {
      os << "<text x=\"" << left << "\" y=\"" << y0 + H - 20 << "\">" << fmt(xmin) << "</text>\n";
      os << "<text x=\"" << W - right - 40 << "\" y=\"" << y0 + H - 20 << "\">" << fmt(xmax)
         << "</text>\n";
      os << "<text x=\"" << (W - right) / 2 << "\" y=\"" << y0 + H - 5 << "\">sigma</text>\n";
    } else {
      for (std::size_t i = 0; i < p.x_labels.size(); ++i)
        os << "<text x=\"" << sx(static_cast<double>(i)) - 15 << "\" y=\"" << y0 + H - 20 << "\">"
           << p.x_labels[i] << "</text>\n";
    }
    std::size_t ci = 0;
    for (const auto& [window, pts] : p.series) {
      const char* color = kPalette[ci % std::size(kPalette)];
      os << "<polyline class=\"mse\" data-window=\"" << window << "\" fill=\"none\" stroke=\""
         << color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : pts) os << sx(x) << ',' << sy(y) << ' ';
      os << "\"/>\n";
      os << "<text x=\"" << W - right + 10 << "\" y=\"" << y0 + top + 15 + 16 * static_cast<double>(ci)
         << "\" fill=\"" << color << "\">" << window << "</text>\n";
      ++ci;
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw IoError("write failed for " + path.string());
}

void emit_report(const ExperimentReport& r, Format format, const std::filesystem::path& path) {
  if (r.records.empty()) throw InputError("refusing to emit an empty report");
  switch (format) {
    case Format::csv: write_text(path, to_csv(r)); break;
    case Format::json: write_text(path, to_json(r)); break;
    case Format::svg: write_text(path, to_svg(r)); break;
  }
}

std::string coefficients_csv(const gabor::Coefficients<double>& c) {
  std::ostringstream os;
  os << "m,n,re,im\n" << std::setprecision(17);
  for (Eigen::Index n = 0; n < c.grid.cols(); ++n)
    for (Eigen::Index m = 0; m < c.grid.rows(); ++m)
      os << m << ',' << n << ',' << c.grid(m, n).real() << ',' << c.grid(m, n).imag() << '\n';
  return os.str();
}

std::string coefficients_svg(const gabor::Coefficients<double>& c, int max_cells) {
  const Eigen::Index rows = c.grid.rows(), cols = c.grid.cols();
  const Eigen::Index rstep = std::max<Eigen::Index>(1, (rows + max_cells - 1) / max_cells);
  const Eigen::Index cstep = std::max<Eigen::Index>(1, (cols + max_cells - 1) / max_cells);
  const Eigen::Index R = (rows + rstep - 1) / rstep, C = (cols + cstep - 1) / cstep;
  Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(R, C);
  for (Eigen::Index n = 0; n < cols; ++n)
    for (Eigen::Index m = 0; m < rows; ++m)
      pooled(m / rstep, n / cstep) = std::max(pooled(m / rstep, n / cstep), std::abs(c.grid(m, n)));
  const double peak = pooled.maxCoeff();
  constexpr double cell = 3.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << C * cell << "\" height=\"" << R * cell
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"#000\"/>\n";
  for (Eigen::Index i = 0; i < R; ++i)
    for (Eigen::Index j = 0; j < C; ++j) {
      // 60 dB dynamic range, low frequencies at the bottom
      const double db = peak > 0 ? 20.0 * std::log10(std::max(pooled(i, j) / peak, 1e-3)) : -60.0;
      const int level = static_cast<int>(std::lround(255.0 * (db + 60.0) / 60.0));
      if (level <= 0) continue;
      os << "<rect x=\"" << j * cell << "\" y=\"" << (R - 1 - i) * cell << "\" width=\"" << cell
         << "\" height=\"" << cell << "\" fill=\"rgb(" << level << ',' << level / 2 << ','
         << 255 - level << ")\"/>\n";
    }
  os << "</svg>\n";
  return os.str();
}

}  // namespace stardgt::report
