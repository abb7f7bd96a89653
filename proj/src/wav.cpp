#include "stardgt/wav.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "stardgt/error.hpp"

namespace stardgt::wav {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

void put16(std::ostream& os, std::uint16_t v) {
  os.put(static_cast<char>(v & 0xff));
  os.put(static_cast<char>(v >> 8));
}

void put32(std::ostream& os, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

PcmMono16 read(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw CorruptHeader(path.string() + ": not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::size_t len = le32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16 || len > avail) throw CorruptHeader(path.string() + ": bad fmt chunk");
      const unsigned char* f = bytes.data() + body;
      std::uint16_t format = le16(f);
      channels = le16(f + 2);
      rate = le32(f + 4);
      bits = le16(f + 14);
      if (format == kFormatExtensible) {
        if (len < 40) throw CorruptHeader(path.string() + ": short extensible fmt chunk");
        format = le16(f + 24);  // first two bytes of the subformat GUID
      }
      if (format != kFormatPcm) throw UnsupportedFormat(path.string() + ": not PCM");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = std::min(len, avail);  // tolerate a truncated final chunk
      break;
    }
    pos = body + len + (len & 1);
  }
  if (!have_fmt) throw CorruptHeader(path.string() + ": missing fmt chunk");
  if (!data) throw CorruptHeader(path.string() + ": missing data chunk");
  if (channels != 1)
    throw UnsupportedFormat(path.string() + ": " + std::to_string(channels) + " channels, need mono");
  if (bits != 16)
    throw UnsupportedFormat(path.string() + ": " + std::to_string(bits) + "-bit, need 16-bit");
  if (rate == 0) throw CorruptHeader(path.string() + ": zero sample rate");

  PcmMono16 out;
  out.sample_rate = static_cast<int>(rate);
  const std::size_t n = data_len / 2;
  out.samples.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::int16_t>(le16(data + 2 * i));
    out.samples[static_cast<Eigen::Index>(i)] = static_cast<double>(k) / 32768.0;
  }
  return out;
}

void write(const std::filesystem::path& path, const Eigen::VectorXd& samples, int sample_rate) {
  if (sample_rate <= 0) throw InputError("sample rate must be positive");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  const auto n = static_cast<std::uint32_t>(samples.size());
  os.write("RIFF", 4);
  put32(os, 36 + 2 * n);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  put32(os, 16);
  put16(os, kFormatPcm);
  put16(os, 1);
  put32(os, static_cast<std::uint32_t>(sample_rate));
  put32(os, static_cast<std::uint32_t>(sample_rate) * 2);
  put16(os, 2);
  put16(os, 16);
  os.write("data", 4);
  put32(os, 2 * n);
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    const double q = std::clamp(std::round(samples[i] * 32768.0), -32768.0, 32767.0);
    put16(os, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  if (!os) throw IoError("write failed for " + path.string());
}

}  // namespace stardgt::wav
