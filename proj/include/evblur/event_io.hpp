#pragma once

#include "evblur/event.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>

namespace evblur {

struct SensorGeometry {
  std::size_t width = 0;
  std::size_t height = 0;
};

enum class EventFormat { Text, Evt1 };

/// Text format: one `t x y p` record per line, `#` lines ignored. The writer
/// emits a `# sensor <width> <height>` comment that the reader honours.
void write_events_text(std::ostream& out, const EventStream& stream);
/// EVT1: "EVT1", u32 width, u32 height, then 14-byte little-endian records
/// (f64 t, u16 x, u16 y, i8 p, pad).
void write_events_evt1(std::ostream& out, const EventStream& stream);

void write_events(const std::filesystem::path& path, const EventStream& stream, EventFormat format);

/// Reads either format (sniffed from the magic bytes). Geometry comes from the
/// file when present, else from `geometry`, else from the largest coordinate.
/// The span defaults to [first t, last t] unless `span` is given.
EventStream read_events(const std::filesystem::path& path,
                        std::optional<SensorGeometry> geometry = std::nullopt,
                        std::optional<TimeSpan> span = std::nullopt);
EventStream read_events(std::istream& in, std::optional<SensorGeometry> geometry = std::nullopt,
                        std::optional<TimeSpan> span = std::nullopt);

} // namespace evblur
