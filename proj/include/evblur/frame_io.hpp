#pragma once

#include "evblur/raster.hpp"

#include <filesystem>
#include <iosfwd>

namespace evblur {

/// FRM1: "FRM1", u32 height, u32 width, then row-major little-endian f32.
void write_frm1(std::ostream& out, const Raster& image);
void write_frm1(const std::filesystem::path& path, const Raster& image);
Raster read_frm1(std::istream& in);
Raster read_frm1(const std::filesystem::path& path);

/// Binary PGM (P5). Values are multiplied by `scale`, mapped so 1.0 hits the
/// maximum code, and clamped. bits is 8 or 16.
void write_pgm(const std::filesystem::path& path, const Raster& image, int bits = 8,
               double scale = 1.0);
/// Reads P5 (8 or 16 bit) as values in [0, 1].
Raster read_pgm(const std::filesystem::path& path);

/// FRM1 or PGM, chosen by extension (.frm / .pgm).
Frame read_frame(const std::filesystem::path& path);

} // namespace evblur
