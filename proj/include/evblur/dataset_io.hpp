#pragma once

#include "evblur/event_io.hpp"
#include "evblur/sim.hpp"

#include <filesystem>
#include <vector>

namespace evblur {

/// Writes each record's blurs, ground truth and events next to a JSON-lines
/// manifest (`manifest.jsonl`, one record per line) inside `dir`. Paths in the
/// manifest are relative to `dir`.
std::filesystem::path write_dataset(const std::filesystem::path& dir,
                                    const std::vector<DatasetRecord>& records,
                                    const SimConfig& config, EventFormat format);

/// Loads every record listed in a manifest.
std::vector<DatasetRecord> read_manifest(const std::filesystem::path& manifest);

/// One reconstructed latent written by the reconstruction tools.
struct ReconstructionEntry {
  std::size_t record = 0;
  double timestamp = 0.0;
  std::filesystem::path path;  // relative to the index file
};

void write_reconstruction_index(const std::filesystem::path& index_path,
                                const std::vector<ReconstructionEntry>& entries);
std::vector<ReconstructionEntry> read_reconstruction_index(const std::filesystem::path& index_path);

} // namespace evblur
