#pragma once

#include <filesystem>
#include <string>

#include "stardgt/gabor.hpp"
#include "stardgt/harness.hpp"

namespace stardgt::report {

enum class Format { csv, json, svg };

Format format_from_path(const std::filesystem::path& p);

/// Columns signal,window,noise,sigma,a,b,trials,mse.
std::string to_csv(const harness::ExperimentReport& r);
std::string to_json(const harness::ExperimentReport& r);
harness::ExperimentReport from_json(const std::string& text);
/// MSE on a log axis, one polyline per window in every panel. Panels are
/// (signal, noise, lattice) groups plotted against sigma, or (signal, noise)
/// groups plotted against the lattice pair when sigma is fixed.
std::string to_svg(const harness::ExperimentReport& r);

/// Throws InputError for an empty report and IoError on write failure.
void emit_report(const harness::ExperimentReport& r, Format format,
                 const std::filesystem::path& path);

/// Coefficient dump with header m,n,re,im.
std::string coefficients_csv(const gabor::Coefficients<double>& c);
/// Heat map of |c(m, n)| (max-pooled down to at most max_cells per axis).
std::string coefficients_svg(const gabor::Coefficients<double>& c, int max_cells = 256);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace stardgt::report
