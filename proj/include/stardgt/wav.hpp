#pragma once

#include <filesystem>

#include <Eigen/Dense>

namespace stardgt::wav {

struct PcmMono16 {
  int sample_rate = 16000;
  Eigen::VectorXd samples;  // k / 32768 for each 16-bit sample k
};

/// Reads a mono 16-bit PCM RIFF/WAVE file (plain PCM or extensible with PCM
/// subformat). Throws UnsupportedFormat or CorruptHeader.
PcmMono16 read(const std::filesystem::path& path);

/// Writes round(x * 32768) clamped to the int16 range.
void write(const std::filesystem::path& path, const Eigen::VectorXd& samples, int sample_rate);

}  // namespace stardgt::wav
