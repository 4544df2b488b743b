#include "evblur/event_io.hpp"

#include "evblur/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace evblur {
namespace {

constexpr std::array<char, 4> kEvt1Magic{'E', 'V', 'T', '1'};
constexpr std::size_t kEvt1RecordSize = 14;

template <typename T>
void put_le(char* dst, T value) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bits.begin(), bits.end());
  }
  std::memcpy(dst, bits.data(), sizeof(T));
}

template <typename T>
T get_le(const char* src) {
  std::array<unsigned char, sizeof(T)> bits;
  std::memcpy(bits.data(), src, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bits.begin(), bits.end());
  }
  return std::bit_cast<T>(bits);
}

EventStream finish(std::vector<Event> events, std::optional<SensorGeometry> geometry,
                   std::optional<TimeSpan> span) {
  if (!geometry) {
    SensorGeometry g{1, 1};
    for (const Event& e : events) {
      g.width = std::max<std::size_t>(g.width, e.x + 1u);
      g.height = std::max<std::size_t>(g.height, e.y + 1u);
    }
    geometry = g;
  }
  if (!span) {
    TimeSpan s{0.0, 0.0};
    if (!events.empty()) {
      auto [lo, hi] = std::minmax_element(events.begin(), events.end(),
                                          [](const Event& a, const Event& b) { return a.t < b.t; });
      s = {lo->t, hi->t};
    }
    span = s;
  }
  return EventStream(geometry->width, geometry->height, *span, std::move(events));
}

EventStream read_text(std::istream& in, std::optional<SensorGeometry> geometry,
                      std::optional<TimeSpan> span) {
  std::vector<Event> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream comment(line.substr(first + 1));
      std::string key;
      std::size_t w = 0, h = 0;
      if (comment >> key && key == "sensor" && comment >> w >> h) {
        geometry = SensorGeometry{w, h};
      }
      continue;
    }
    std::istringstream fields(line);
    double t = 0.0;
    long x = 0, y = 0;
    int p = 0;
    if (!(fields >> t >> x >> y >> p)) {
      throw FormatError("malformed event on line " + std::to_string(line_no) + ": '" + line + "'");
    }
    if (x < 0 || y < 0 || x > std::numeric_limits<std::uint16_t>::max() ||
        y > std::numeric_limits<std::uint16_t>::max()) {
      throw FormatError("event coordinate out of range on line " + std::to_string(line_no));
    }
    events.push_back({t, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                      normalize_polarity(p)});
  }
  return finish(std::move(events), geometry, span);
}

EventStream read_evt1(std::istream& in, std::optional<TimeSpan> span) {
  char header[12];
  if (!in.read(header, sizeof(header))) {
    throw FormatError("truncated EVT1 header");
  }
  const SensorGeometry geometry{get_le<std::uint32_t>(header + 4), get_le<std::uint32_t>(header + 8)};
  std::vector<Event> events;
  char record[kEvt1RecordSize];
  while (in.read(record, kEvt1RecordSize)) {
    events.push_back({get_le<double>(record), get_le<std::uint16_t>(record + 8),
                      get_le<std::uint16_t>(record + 10),
                      normalize_polarity(static_cast<std::int8_t>(record[12]))});
  }
  if (in.gcount() != 0) {
    throw FormatError("EVT1 payload is not a whole number of 14-byte records");
  }
  return finish(std::move(events), geometry, span);
}

} // namespace

void write_events_text(std::ostream& out, const EventStream& stream) {
  out << "# sensor " << stream.width() << ' ' << stream.height() << '\n';
  out << std::setprecision(17);
  for (const Event& e : stream.events()) {
    out << e.t << ' ' << e.x << ' ' << e.y << ' ' << static_cast<int>(e.p) << '\n';
  }
}

void write_events_evt1(std::ostream& out, const EventStream& stream) {
  char header[12];
  std::memcpy(header, kEvt1Magic.data(), 4);
  put_le(header + 4, static_cast<std::uint32_t>(stream.width()));
  put_le(header + 8, static_cast<std::uint32_t>(stream.height()));
  out.write(header, sizeof(header));
  char record[kEvt1RecordSize];
  for (const Event& e : stream.events()) {
    put_le(record, e.t);
    put_le(record + 8, e.x);
    put_le(record + 10, e.y);
    record[12] = static_cast<char>(e.p);
    record[13] = 0;
    out.write(record, kEvt1RecordSize);
  }
}

void write_events(const std::filesystem::path& path, const EventStream& stream,
                  EventFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw FormatError("cannot open '" + path.string() + "' for writing");
  }
  if (format == EventFormat::Evt1) {
    write_events_evt1(out, stream);
  } else {
    write_events_text(out, stream);
  }
  if (!out) {
    throw FormatError("failed writing '" + path.string() + "'");
  }
}

EventStream read_events(std::istream& in, std::optional<SensorGeometry> geometry,
                        std::optional<TimeSpan> span) {
  char magic[4] = {};
  in.read(magic, 4);
  const bool is_evt1 = in.gcount() == 4 && std::memcmp(magic, kEvt1Magic.data(), 4) == 0;
  in.clear();
  in.seekg(0);
  if (is_evt1) {
    return read_evt1(in, span);
  }
  return read_text(in, geometry, span);
}

EventStream read_events(const std::filesystem::path& path, std::optional<SensorGeometry> geometry,
                        std::optional<TimeSpan> span) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open event file '" + path.string() + "'");
  }
  try {
    return read_events(in, geometry, span);
  } catch (const FormatError& e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  } catch (const DomainError& e) {
    throw DomainError("'" + path.string() + "': " + e.what());
  }
}

} // namespace evblur
