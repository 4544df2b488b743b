#include "evblur/calibrate.hpp"
#include "evblur/dataset_io.hpp"
#include "evblur/error.hpp"
#include "evblur/event_io.hpp"
#include "evblur/frame_io.hpp"
#include "evblur/losses.hpp"
#include "evblur/metrics.hpp"
#include "evblur/reconstruct.hpp"
#include "evblur/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace evblur;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct SimulateOptions {
  bool bundled = false;
  std::string input;
  double frame_interval = 1.0 / 1024.0;
  double contrast_step = 0.2;
  double c = 0.2;
  std::string protocol = "deblur";
  double refractory = 0.0;
  double noise_rate = 0.0;
  std::uint64_t seed = 0;
  std::string event_format = "text";
  std::string output;
};

struct RecordSelection {
  std::string manifest;
  std::optional<std::size_t> record;
};

struct LatentOptions {
  RecordSelection records;
  double c = 0.2;
  std::size_t count = 7;
  std::vector<double> timestamps;
  bool at_ground_truth = false;
  bool pgm = false;
  std::string output;
};

struct CalibrateOptions {
  RecordSelection records;
  double c_min = 0.05;
  double c_max = 1.0;
  std::size_t grid_points = 25;
  double tol = 1e-3;
  std::size_t samples = 5;
  std::size_t m_per_window = 7;
  double alpha = 512.0;
  double beta = 1.0;
  double gamma = 0.1;
  std::string output;
};

struct EvaluateOptions {
  std::string manifest;
  std::string reconstructions;
  double peak = 1.0;
  std::string output;
};

struct LossesOptions {
  RecordSelection records;
  double c = 0.2;
  std::optional<double> anchor;
  std::size_t m_per_window = 7;
  double alpha = 512.0;
  double beta = 1.0;
  double gamma = 0.1;
  std::string output;
};

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

void collect_options(const CLI::App& app, nlohmann::ordered_json& options) {
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    std::vector<std::string> values = opt->results();
    if (values.empty() && !opt->get_default_str().empty()) values = {opt->get_default_str()};
    if (opt->get_expected_max() == 0) {
      options[name] = opt->count() > 0;
    } else if (opt->get_expected_max() > 1) {
      options[name] = values;
    } else if (values.empty()) {
      options[name] = nullptr;
    } else {
      options[name] = values.back();
    }
  }
  for (const CLI::App* group : app.get_subcommands([](const CLI::App* a) { return a->get_name().empty(); })) {
    collect_options(*group, options);
  }
}

// Every option of the subcommand with its resolved value.
void write_run_json(const CLI::App& sub, const fs::path& dir) {
  nlohmann::ordered_json options;
  collect_options(sub, options);
  nlohmann::ordered_json run;
  run["command"] = sub.get_name();
  run["options"] = options;
  fs::create_directories(dir);
  write_text(dir / "run.json", run.dump(2) + "\n");
}

std::vector<DatasetRecord> load_records(const RecordSelection& sel) {
  std::vector<DatasetRecord> records = read_manifest(sel.manifest);
  if (records.empty()) throw DomainError("manifest '" + sel.manifest + "' lists no records");
  if (!sel.record) return records;
  if (*sel.record >= records.size()) {
    throw DomainError("--record " + std::to_string(*sel.record) + " out of range: manifest '" +
                      sel.manifest + "' has " + std::to_string(records.size()) + " records");
  }
  return {records[*sel.record]};
}

std::size_t record_id(const RecordSelection& sel, std::size_t position) {
  return sel.record ? *sel.record : position;
}

std::string latent_name(std::size_t record, std::size_t k) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "latent_%03zu_%03zu", record, k);
  return buf;
}

// Timestamps at which the held frames of an exposure were sampled: the window
// minus its final hold interval when the frame interval is known.
ExposureWindow sample_range(const ExposureWindow& w, double frame_interval) {
  if (frame_interval > 0.0 && w.duration() > frame_interval * (1.0 + 1e-9)) {
    return ExposureWindow(w.start(), w.duration() - frame_interval);
  }
  return w;
}

std::vector<double> ground_truth_times(const DatasetRecord& rec, double lo, double hi) {
  std::vector<double> out;
  for (const auto& g : rec.ground_truth) {
    if (g.timestamp >= lo && g.timestamp <= hi) out.push_back(g.timestamp);
  }
  return out;
}

Frame single_latent(const DatasetRecord& rec, double f, const ThresholdModel& c) {
  const BlurryObservation& b = rec.blurs.front();
  return latent_from_blur(b, edi_map(rec.events, f, b.window, c));
}

enum class LatentMode { Deblur, Interpolate, Reconstruct };

void check_in_span(double t, std::size_t k, double lo, double hi, const char* flag) {
  if (t < lo || t > hi) {
    std::ostringstream msg;
    msg.precision(17);
    msg << flag << ": timestamp #" << k << " (f = " << t << ") outside span [" << lo << ", " << hi
        << "]";
    throw DomainError(msg.str());
  }
}

void run_latents(const CLI::App& sub, const LatentOptions& opt, LatentMode mode) {
  const ThresholdModel c(opt.c);
  const std::vector<DatasetRecord> records = load_records(opt.records);
  const fs::path out_dir(opt.output);
  fs::create_directories(out_dir);

  std::vector<ReconstructionEntry> index;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const DatasetRecord& rec = records[r];
    const std::size_t id = record_id(opt.records, r);
    std::vector<double> times;

    if (mode == LatentMode::Deblur) {
      for (const auto& b : rec.blurs) {
        const auto ts = opt.at_ground_truth
                            ? ground_truth_times(rec, b.window.start(), b.window.end())
                            : exposure_grid(sample_range(b.window, rec.frame_interval), opt.count);
        for (double t : ts) {
          if (times.empty() || t != times.back()) times.push_back(t);
        }
      }
    } else if (mode == LatentMode::Interpolate) {
      if (!rec.has_pair()) {
        throw DomainError("record " + std::to_string(id) + " has a single exposure; interpolate needs a pair");
      }
      const double gap_lo = rec.blurs[0].window.end();
      const double gap_hi = rec.blurs[1].window.start();
      if (!(gap_hi > gap_lo)) {
        throw DomainError("record " + std::to_string(id) + ": no gap between the exposures");
      }
      if (!opt.timestamps.empty()) {
        for (std::size_t k = 0; k < opt.timestamps.size(); ++k) {
          check_in_span(opt.timestamps[k], k, gap_lo, gap_hi, "--timestamps");
        }
        times = opt.timestamps;
      } else if (opt.at_ground_truth) {
        times = ground_truth_times(rec, gap_lo, gap_hi);
      } else {
        double hi = gap_hi;
        if (rec.frame_interval > 0.0 && hi - rec.frame_interval > gap_lo) hi -= rec.frame_interval;
        for (std::size_t k = 1; k <= opt.count; ++k) {
          times.push_back(gap_lo + (hi - gap_lo) * static_cast<double>(k) /
                                       static_cast<double>(opt.count + 1));
        }
      }
    } else {
      const double lo = rec.blurs.front().window.start();
      const double hi = rec.blurs.back().window.end();
      if (opt.at_ground_truth) {
        times = ground_truth_times(rec, lo, hi);
      } else {
        for (std::size_t k = 0; k < opt.timestamps.size(); ++k) {
          check_in_span(opt.timestamps[k], k, lo, hi, "--timestamps");
        }
        times = opt.timestamps;
      }
    }

    std::vector<Frame> latents;
    if (rec.has_pair()) {
      latents = reconstruct_video(rec.pair(), times, c);
    } else {
      for (double t : times) latents.push_back(single_latent(rec, t, c));
    }
    for (std::size_t k = 0; k < latents.size(); ++k) {
      const std::string name = latent_name(id, k);
      write_frm1(out_dir / (name + ".frm"), latents[k].raster());
      if (opt.pgm) write_pgm(out_dir / (name + ".pgm"), latents[k].raster());
      index.push_back({id, times[k], name + ".frm"});
    }
  }
  write_reconstruction_index(out_dir / "reconstructions.jsonl", index);
  write_run_json(sub, out_dir);
  std::cout << "wrote " << index.size() << " latents to " << out_dir.string() << "\n";
}

SharpSequence load_video(const SimulateOptions& opt) {
  if (opt.bundled) {
    BundledSequenceConfig config;
    config.frame_interval = opt.frame_interval;
    config.contrast_step = opt.contrast_step;
    return bundled_sequence(config);
  }
  const fs::path dir(opt.input);
  if (!fs::is_directory(dir)) throw FormatError("--input: '" + opt.input + "' is not a directory");
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".pgm" || ext == ".frm")) paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.size() < 2) {
    throw DomainError("--input: '" + opt.input + "' holds " + std::to_string(paths.size()) +
                      " frames (.pgm or .frm), need at least 2");
  }
  std::vector<Frame> frames;
  for (const auto& p : paths) frames.push_back(read_frame(p));
  return SharpSequence(std::move(frames), opt.frame_interval);
}

void run_simulate(const CLI::App& sub, const SimulateOptions& opt) {
  SimConfig config;
  config.c = opt.c;
  config.refractory = opt.refractory;
  config.noise_rate = opt.noise_rate;
  config.seed = opt.seed;
  const SharpSequence seq = load_video(opt);
  const auto records = make_dataset(seq, parse_protocol(opt.protocol), config);
  const auto format = opt.event_format == "evt1" ? EventFormat::Evt1 : EventFormat::Text;
  const auto manifest = write_dataset(opt.output, records, config, format);
  write_run_json(sub, opt.output);
  std::cout << "wrote " << records.size() << " records to " << manifest.string() << "\n";
}

CalibrationConfig calibration_config(const CalibrateOptions& opt) {
  CalibrationConfig config;
  config.c_min = opt.c_min;
  config.c_max = opt.c_max;
  config.grid_points = opt.grid_points;
  config.tol = opt.tol;
  config.sample_timestamps = opt.samples;
  config.m_per_window = opt.m_per_window;
  config.objective_weights = LossWeights(opt.alpha, opt.beta, opt.gamma);
  config.validate();
  return config;
}

int run_calibrate(const CLI::App& sub, const CalibrateOptions& opt) {
  const CalibrationConfig config = calibration_config(opt);
  std::vector<InputPair> pairs;
  for (const auto& rec : load_records(opt.records)) {
    if (rec.has_pair()) pairs.push_back(rec.pair());
  }
  if (pairs.empty()) {
    throw DomainError("--manifest: '" + opt.records.manifest + "' has no two-exposure records");
  }
  const CalibrationResult result = calibrate_threshold(pairs, config);

  const fs::path out_dir(opt.output);
  fs::create_directories(out_dir);
  std::ostringstream report;
  report.precision(17);
  report << "c_star=" << result.c_star << "\nobjective=" << result.objective
         << "\nidentifiable=" << (result.identifiable ? "true" : "false")
         << "\nevaluations=" << result.evaluations << "\n";
  write_text(out_dir / "calibration.txt", report.str());
  std::ostringstream grid;
  grid.precision(17);
  grid << "c,objective\n";
  for (const auto& s : result.grid) grid << s.c << "," << s.objective << "\n";
  write_text(out_dir / "calibration_grid.csv", grid.str());
  write_run_json(sub, out_dir);
  std::cout << report.str();
  if (!result.identifiable) {
    std::cerr << "error: objective is flat over [" << opt.c_min << ", " << opt.c_max
              << "]; threshold not identifiable from '" << opt.records.manifest << "'\n";
    return kNumerical;
  }
  return kOk;
}

int run_evaluate(const CLI::App& sub, const EvaluateOptions& opt) {
  const auto records = read_manifest(opt.manifest);
  const fs::path index_path(opt.reconstructions);
  const auto entries = read_reconstruction_index(index_path);

  std::map<std::size_t, std::vector<std::pair<double, Frame>>> latents;
  for (const auto& e : entries) {
    latents[e.record].emplace_back(e.timestamp, read_frame(index_path.parent_path() / e.path));
  }
  std::vector<EvaluationItem> items;
  for (std::size_t r = 0; r < records.size(); ++r) {
    for (const auto& g : records[r].ground_truth) {
      const Frame* match = nullptr;
      for (const auto& [t, frame] : latents[r]) {
        if (std::abs(t - g.timestamp) <= 1e-9 * std::max(1.0, std::abs(g.timestamp))) {
          match = &frame;
          break;
        }
      }
      items.push_back({r, g.timestamp, &g.frame, match});
    }
  }
  const EvaluationTable table = evaluate(items, opt.peak);

  const fs::path out_dir(opt.output);
  fs::create_directories(out_dir);
  std::ostringstream csv;
  write_csv(csv, table);
  write_text(out_dir / "metrics.csv", csv.str());
  write_run_json(sub, out_dir);

  if (!table.rows.empty()) {
    const MetricReport mean = table.aggregate();
    std::cout << "frames=" << table.rows.size() << " psnr_db=" << format_double(mean.psnr)
              << " ssim=" << format_double(mean.ssim) << "\n";
  }
  if (!table.missing.empty()) {
    std::cerr << "error: " << table.missing.size() << " ground-truth frames have no reconstruction in '"
              << opt.reconstructions << "':\n";
    for (const auto& m : table.missing) {
      std::cerr << "  record " << m.record << " timestamp " << format_double(m.timestamp) << "\n";
    }
    return kData;
  }
  return kOk;
}

void run_losses(const CLI::App& sub, const LossesOptions& opt) {
  const LossWeights weights(opt.alpha, opt.beta, opt.gamma);
  const ThresholdModel c(opt.c);
  RecordSelection sel = opt.records;
  if (!sel.record) sel.record = 0;
  const auto records = load_records(sel);
  const DatasetRecord& rec = records.front();
  const InputPair pair = rec.pair();
  const double f = opt.anchor.value_or(pair.first().window.end());
  if (!pair.timeline().contains(f)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "--anchor: f = " << f << " outside pair span [" << pair.timeline().begin() << ", "
        << pair.timeline().end() << "]";
    throw DomainError(msg.str());
  }
  const LossReport report = total_loss(pair, f, c, weights, opt.m_per_window);
  const std::string text = format_report(report);
  if (!opt.output.empty()) {
    fs::create_directories(opt.output);
    write_text(fs::path(opt.output) / "losses.txt", text);
    write_run_json(sub, opt.output);
  }
  std::cout << text;
}

void add_selection(CLI::App* sub, RecordSelection& sel) {
  sub->add_option("--manifest", sel.manifest, "Dataset manifest (manifest.jsonl)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--record", sel.record, "Use only this record (0-based)");
}

void add_weights(CLI::App* sub, double& alpha, double& beta, double& gamma) {
  sub->add_option("--alpha", alpha, "Weight of the blurry-event loss")->check(CLI::NonNegativeNumber);
  sub->add_option("--beta", beta, "Weight of the blurry-sharp loss")->check(CLI::NonNegativeNumber);
  sub->add_option("--gamma", gamma, "Weight of the sharp-event loss")->check(CLI::NonNegativeNumber);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-based blurry frame deblurring and interpolation"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "TOML/INI file of option values (flags override)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate events and blurry frames from a video");
  auto* source = simulate->add_option_group("source");
  source->add_flag("--bundled", sim.bundled, "Use the built-in 64x64 moving disc sequence");
  source->add_option("--input", sim.input, "Directory of .pgm or .frm frames, sorted by name");
  source->require_option(1);
  simulate->add_option("--frame-interval", sim.frame_interval, "Seconds between frames")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--contrast-step", sim.contrast_step, "Log step between disc rings (bundled)")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--c", sim.c, "Contrast threshold")->check(CLI::PositiveNumber);
  simulate->add_option("--protocol", sim.protocol, "deblur, skip1 or skip3")
      ->check(CLI::IsMember({"deblur", "skip1", "skip3"}));
  simulate->add_option("--refractory", sim.refractory, "Refractory period (s)")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--noise-rate", sim.noise_rate, "Noise events per pixel per second")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--seed", sim.seed, "Noise seed");
  simulate->add_option("--event-format", sim.event_format, "text or evt1")
      ->check(CLI::IsMember({"text", "evt1"}));
  simulate->add_option("--output", sim.output, "Output directory")->required();

  LatentOptions deb;
  auto* deblur = app.add_subcommand("deblur", "Latent frames inside each exposure");
  add_selection(deblur, deb.records);
  deblur->add_option("--c", deb.c, "Contrast threshold")->check(CLI::PositiveNumber);
  auto* deb_times = deblur->add_option_group("timestamps");
  deb_times->add_option("--count", deb.count, "Latents per exposure")->check(CLI::PositiveNumber);
  deb_times->add_flag("--at-ground-truth", deb.at_ground_truth,
                      "Use the manifest's ground-truth timestamps inside the exposures");
  deb_times->require_option(0, 1);
  deblur->add_flag("--pgm", deb.pgm, "Also export 8-bit PGM images");
  deblur->add_option("--output", deb.output, "Output directory")->required();

  LatentOptions itp;
  auto* interpolate = app.add_subcommand("interpolate", "Latent frames in the gap between exposures");
  add_selection(interpolate, itp.records);
  interpolate->add_option("--c", itp.c, "Contrast threshold")->check(CLI::PositiveNumber);
  auto* itp_times = interpolate->add_option_group("timestamps");
  itp_times->add_option("--timestamps", itp.timestamps, "Absolute timestamps (s)")->delimiter(',');
  itp_times->add_option("--count", itp.count, "Evenly spaced latents, gap ends excluded")
      ->check(CLI::PositiveNumber);
  itp_times->add_flag("--at-ground-truth", itp.at_ground_truth,
                      "Use the manifest's ground-truth timestamps in the gap");
  itp_times->require_option(1);
  interpolate->add_flag("--pgm", itp.pgm, "Also export 8-bit PGM images");
  interpolate->add_option("--output", itp.output, "Output directory")->required();

  LatentOptions rec;
  auto* reconstruct = app.add_subcommand("reconstruct", "Latent frames at arbitrary timestamps");
  add_selection(reconstruct, rec.records);
  reconstruct->add_option("--c", rec.c, "Contrast threshold")->check(CLI::PositiveNumber);
  auto* rec_times = reconstruct->add_option_group("timestamps");
  rec_times->add_option("--timestamps", rec.timestamps, "Absolute timestamps (s)")->delimiter(',');
  rec_times->add_flag("--at-ground-truth", rec.at_ground_truth,
                      "Use the manifest's ground-truth timestamps");
  rec_times->require_option(1);
  reconstruct->add_flag("--pgm", rec.pgm, "Also export 8-bit PGM images");
  reconstruct->add_option("--output", rec.output, "Output directory")->required();

  CalibrateOptions cal;
  auto* calibrate = app.add_subcommand("calibrate", "Estimate the contrast threshold");
  add_selection(calibrate, cal.records);
  calibrate->add_option("--c-min", cal.c_min, "Lower bound")->check(CLI::PositiveNumber);
  calibrate->add_option("--c-max", cal.c_max, "Upper bound")->check(CLI::PositiveNumber);
  calibrate->add_option("--grid-points", cal.grid_points, "Coarse scan size")
      ->check(CLI::Range(std::size_t{3}, std::size_t{100000}));
  calibrate->add_option("--tol", cal.tol, "Final bracket width")->check(CLI::PositiveNumber);
  calibrate->add_option("--samples", cal.samples, "Anchor timestamps per pair")
      ->check(CLI::PositiveNumber);
  calibrate->add_option("--m-per-window", cal.m_per_window, "Latents per exposure in the reblur")
      ->check(CLI::PositiveNumber);
  add_weights(calibrate, cal.alpha, cal.beta, cal.gamma);
  calibrate->add_option("--output", cal.output, "Output directory")->required();

  EvaluateOptions ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "PSNR/SSIM of reconstructions vs ground truth");
  evaluate_cmd->add_option("--manifest", ev.manifest, "Dataset manifest")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--reconstructions", ev.reconstructions, "reconstructions.jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--peak", ev.peak, "Peak signal value")->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--output", ev.output, "Output directory")->required();

  LossesOptions los;
  auto* losses = app.add_subcommand("losses", "Self-supervised losses of one pair");
  add_selection(losses, los.records);
  losses->add_option("--c", los.c, "Contrast threshold")->check(CLI::PositiveNumber);
  losses->add_option("--anchor", los.anchor, "Anchor timestamp f (default: end of first exposure)");
  losses->add_option("--m-per-window", los.m_per_window, "Latents per exposure in the reblur")
      ->check(CLI::PositiveNumber);
  add_weights(losses, los.alpha, los.beta, los.gamma);
  losses->add_option("--output", los.output, "Optional output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*simulate) run_simulate(*simulate, sim);
    if (*deblur) run_latents(*deblur, deb, LatentMode::Deblur);
    if (*interpolate) run_latents(*interpolate, itp, LatentMode::Interpolate);
    if (*reconstruct) run_latents(*reconstruct, rec, LatentMode::Reconstruct);
    if (*calibrate) return run_calibrate(*calibrate, cal);
    if (*evaluate_cmd) return run_evaluate(*evaluate_cmd, ev);
    if (*losses) run_losses(*losses, los);
  } catch (const CalibrationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}
