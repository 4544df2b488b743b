#include "evblur/frame_io.hpp"

#include "evblur/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace evblur {
namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  auto bits = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  out.write(bits.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<char, sizeof(T)> bits{};
  if (!in.read(bits.data(), sizeof(T))) {
    throw FormatError("truncated FRM1 data");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  return std::bit_cast<T>(bits);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  return out;
}

} // namespace

void write_frm1(std::ostream& out, const Raster& image) {
  out.write("FRM1", 4);
  put_le(out, static_cast<std::uint32_t>(image.height()));
  put_le(out, static_cast<std::uint32_t>(image.width()));
  for (double v : image.values()) put_le(out, static_cast<float>(v));
}

void write_frm1(const std::filesystem::path& path, const Raster& image) {
  auto out = open_out(path);
  write_frm1(out, image);
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

Raster read_frm1(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "FRM1", 4) != 0) {
    throw FormatError("missing FRM1 magic");
  }
  const auto height = get_le<std::uint32_t>(in);
  const auto width = get_le<std::uint32_t>(in);
  std::vector<double> values(static_cast<std::size_t>(height) * width);
  for (double& v : values) v = get_le<float>(in);
  return Raster(height, width, std::move(values));
}

Raster read_frm1(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_frm1(in);
  } catch (const FormatError& e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  }
}

void write_pgm(const std::filesystem::path& path, const Raster& image, int bits, double scale) {
  if (bits != 8 && bits != 16) {
    throw DomainError("PGM export supports 8 or 16 bits, got " + std::to_string(bits));
  }
  const int maxval = bits == 8 ? 255 : 65535;
  auto out = open_out(path);
  out << "P5\n" << image.width() << ' ' << image.height() << '\n' << maxval << '\n';
  for (double v : image.values()) {
    const double code = std::clamp(std::round(v * scale * maxval), 0.0, double(maxval));
    const auto value = static_cast<unsigned>(code);
    if (bits == 8) {
      out.put(static_cast<char>(value));
    } else {
      out.put(static_cast<char>(value >> 8));
      out.put(static_cast<char>(value & 0xff));
    }
  }
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

Raster read_pgm(const std::filesystem::path& path) {
  auto in = open_in(path);
  auto token = [&]() {
    std::string t;
    while (in >> t) {
      if (t.front() != '#') return t;
      std::getline(in, t);
    }
    throw FormatError("'" + path.string() + "': truncated PGM header");
  };
  if (token() != "P5") throw FormatError("'" + path.string() + "': not a binary PGM (P5)");
  const std::size_t width = std::stoul(token());
  const std::size_t height = std::stoul(token());
  const unsigned maxval = static_cast<unsigned>(std::stoul(token()));
  if (maxval == 0 || maxval > 65535) throw FormatError("'" + path.string() + "': bad maxval");
  in.get();
  std::vector<double> values(width * height);
  for (double& v : values) {
    unsigned code = static_cast<unsigned char>(in.get());
    if (maxval > 255) code = (code << 8) | static_cast<unsigned char>(in.get());
    if (!in) throw FormatError("'" + path.string() + "': truncated PGM data");
    v = static_cast<double>(code) / maxval;
  }
  return Raster(height, width, std::move(values));
}

Frame read_frame(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".pgm") return Frame(read_pgm(path));
  if (ext == ".frm") return Frame(read_frm1(path));
  throw FormatError("'" + path.string() + "': unknown frame extension (expected .frm or .pgm)");
}

} // namespace evblur
