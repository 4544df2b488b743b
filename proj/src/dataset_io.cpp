#include "evblur/dataset_io.hpp"

#include "evblur/error.hpp"
#include "evblur/frame_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <string>

namespace evblur {
namespace {

using nlohmann::json;

std::string numbered(const char* prefix, std::size_t record, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03zu%s", prefix, record, ext);
  return buf;
}

std::string numbered(const char* prefix, std::size_t record, std::size_t item, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03zu_%02zu%s", prefix, record, item, ext);
  return buf;
}

template <typename T>
T field(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key)) {
    throw FormatError("manifest line " + std::to_string(line) + ": missing '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError("manifest line " + std::to_string(line) + ": bad '" + key + "': " + e.what());
  }
}

} // namespace

std::filesystem::path write_dataset(const std::filesystem::path& dir,
                                    const std::vector<DatasetRecord>& records,
                                    const SimConfig& config, EventFormat format) {
  std::filesystem::create_directories(dir);
  const auto manifest_path = dir / "manifest.jsonl";
  std::ofstream manifest(manifest_path);
  if (!manifest) throw FormatError("cannot write '" + manifest_path.string() + "'");

  for (std::size_t r = 0; r < records.size(); ++r) {
    const DatasetRecord& rec = records[r];
    json line;
    line["record"] = r;
    line["protocol"] = std::string(protocol_name(rec.protocol));
    line["first_frame"] = rec.first_frame;
    line["width"] = rec.events.width();
    line["height"] = rec.events.height();

    const std::string events_name =
        numbered("events", r, format == EventFormat::Evt1 ? ".evt" : ".txt");
    write_events(dir / events_name, rec.events, format);
    line["events"] = events_name;
    line["event_format"] = format == EventFormat::Evt1 ? "evt1" : "text";
    line["frame_interval"] = rec.frame_interval;
    line["span"] = {rec.events.span().begin, rec.events.span().end};

    json blurs = json::array();
    for (std::size_t b = 0; b < rec.blurs.size(); ++b) {
      const std::string name = numbered("blur", r, b, ".frm");
      write_frm1(dir / name, rec.blurs[b].frame.raster());
      blurs.push_back({{"path", name},
                       {"start", rec.blurs[b].window.start()},
                       {"duration", rec.blurs[b].window.duration()}});
    }
    line["blurs"] = blurs;

    json gt = json::array();
    for (std::size_t g = 0; g < rec.ground_truth.size(); ++g) {
      const std::string name = numbered("gt", r, g, ".frm");
      write_frm1(dir / name, rec.ground_truth[g].frame.raster());
      gt.push_back({{"path", name},
                    {"timestamp", rec.ground_truth[g].timestamp},
                    {"frame_index", rec.ground_truth[g].frame_index}});
    }
    line["gt"] = gt;
    line["sim"] = {{"c", config.c},
                   {"refractory", config.refractory},
                   {"noise_rate", config.noise_rate},
                   {"seed", config.seed}};
    manifest << line.dump() << '\n';
  }
  if (!manifest) throw FormatError("failed writing '" + manifest_path.string() + "'");
  return manifest_path;
}

std::vector<DatasetRecord> read_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw FormatError("cannot open manifest '" + manifest_path.string() + "'");
  const auto dir = manifest_path.parent_path();
  std::vector<DatasetRecord> records;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json line;
    try {
      line = json::parse(text);
    } catch (const json::exception& e) {
      throw FormatError("'" + manifest_path.string() + "' line " + std::to_string(line_no) +
                        ": " + e.what());
    }
    const auto span = field<std::vector<double>>(line, "span", line_no);
    if (span.size() != 2) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": span needs 2 values");
    }
    const SensorGeometry geometry{field<std::size_t>(line, "width", line_no),
                                  field<std::size_t>(line, "height", line_no)};
    DatasetRecord rec{parse_protocol(field<std::string>(line, "protocol", line_no)),
                      field<std::size_t>(line, "first_frame", line_no),
                      {},
                      read_events(dir / field<std::string>(line, "events", line_no), geometry,
                                  TimeSpan{span[0], span[1]}),
                      {}};
    rec.frame_interval = line.value("frame_interval", 0.0);
    for (const auto& b : field<json>(line, "blurs", line_no)) {
      rec.blurs.push_back({read_frame(dir / field<std::string>(b, "path", line_no)),
                           ExposureWindow(field<double>(b, "start", line_no),
                                          field<double>(b, "duration", line_no))});
    }
    if (rec.blurs.empty() || rec.blurs.size() > 2) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": expected 1 or 2 blurs");
    }
    for (const auto& g : field<json>(line, "gt", line_no)) {
      rec.ground_truth.push_back({field<double>(g, "timestamp", line_no),
                                  field<std::size_t>(g, "frame_index", line_no),
                                  read_frame(dir / field<std::string>(g, "path", line_no))});
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_reconstruction_index(const std::filesystem::path& index_path,
                                const std::vector<ReconstructionEntry>& entries) {
  std::ofstream out(index_path);
  if (!out) throw FormatError("cannot write '" + index_path.string() + "'");
  for (const auto& e : entries) {
    out << json{{"record", e.record}, {"timestamp", e.timestamp}, {"path", e.path.string()}}.dump()
        << '\n';
  }
}

std::vector<ReconstructionEntry> read_reconstruction_index(const std::filesystem::path& index_path) {
  std::ifstream in(index_path);
  if (!in) throw FormatError("cannot open reconstruction index '" + index_path.string() + "'");
  std::vector<ReconstructionEntry> entries;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(text);
      entries.push_back({field<std::size_t>(j, "record", line_no),
                         field<double>(j, "timestamp", line_no),
                         field<std::string>(j, "path", line_no)});
    } catch (const json::exception& e) {
      throw FormatError("'" + index_path.string() + "' line " + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  return entries;
}

} // namespace evblur
