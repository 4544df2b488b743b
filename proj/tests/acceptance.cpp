// Acceptance suite: one PASS/FAIL line per criterion. Usage: evblur_acceptance <path-to-cli>
#include "evblur/calibrate.hpp"
#include "evblur/integral.hpp"
#include "evblur/losses.hpp"
#include "evblur/metrics.hpp"
#include "evblur/reconstruct.hpp"
#include "evblur/sim.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace evblur;
using namespace evblur::oracle;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<DatasetRecord> bundled_records(Protocol protocol, double c) {
  BundledSequenceConfig config;
  config.contrast_step = c;
  SimConfig sim;
  sim.c = c;
  return make_dataset(bundled_sequence(config), protocol, sim);
}

Outcome decomposition_identity() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> cdist(0.05, 1.0);
  double worst = 0.0;
  int outside = 0;
  const int fixtures = 1000;
  for (int k = 0; k < fixtures; ++k) {
    const double span = 4.0;
    std::poisson_distribution<int> count(200.0 * u(rng));
    std::vector<Event> events;
    for (std::uint16_t y = 0; y < 3; ++y) {
      for (std::uint16_t x = 0; x < 3; ++x) {
        const int n = std::min(count(rng), 200);
        for (int j = 0; j < n; ++j) {
          events.push_back({span * u(rng), x, y, static_cast<std::int8_t>(u(rng) < 0.5 ? 1 : -1)});
        }
      }
    }
    const EventStream s(3, 3, {0.0, span}, std::move(events));
    const ExposureWindow w(1.0 + u(rng), 0.2 + 1.5 * u(rng));
    const double f = span * u(rng);
    outside += !w.contains(f);
    const ThresholdModel c(cdist(rng));
    const auto direct = edi_map(s, f, w, c);
    const auto split = edi_via_decomposition(s, f, w, c);
    for (std::size_t i = 0; i < direct.values.size(); ++i) {
      worst = std::max(worst, rel(split.values[i], direct.values[i]));
    }
  }
  const double t = seconds_since(start);
  return {worst <= 1e-9 && t <= 60.0 && outside > 0 && outside < fixtures,
          fmt("max rel dev %.3g over %d fixtures (%d with f outside), %.1fs", worst, fixtures,
              outside, t)};
}

Outcome reversal_operator() {
  std::mt19937_64 rng(2002);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> cdist(0.05, 1.0);
  double worst = 0.0;
  const int fixtures = 100;
  for (int k = 0; k < fixtures; ++k) {
    const EventStream s = random_stream(rng, 2, 2, {0.0, 1.0}, 4);
    const double t_r = 0.45 * u(rng);
    const double f = 0.55 + 0.45 * u(rng);
    const double c = cdist(rng);
    const Raster g = g_general(s, f, t_r, ThresholdModel(c));
    for (std::size_t y = 0; y < 2; ++y) {
      for (std::size_t x = 0; x < 2; ++x) {
        const double oracle = riemann_mean(pixel_events(s, x, y), f, t_r, f, c, 1e-5 * (f - t_r));
        worst = std::max(worst, rel(g(y, x), oracle));
      }
    }
  }
  return {worst <= 1e-4, fmt("max rel dev %.3g vs Riemann sum over %d fixtures", worst, fixtures)};
}

Outcome round_trip_deblur() {
  const auto start = Clock::now();
  const auto records = bundled_records(Protocol::Deblur, 0.2);
  const ThresholdModel c(0.2);
  double psnr_sum = 0.0, ssim_sum = 0.0;
  int n = 0;
  for (const auto& r : records) {
    if (!r.has_pair()) continue;
    const InputPair pair = r.pair();
    for (const auto& g : r.ground_truth) {
      const Frame l = reconstruct_latent(pair, g.timestamp, c);
      psnr_sum += psnr(l, g.frame);
      ssim_sum += ssim(l, g.frame);
      ++n;
    }
  }
  const double p = psnr_sum / n, s = ssim_sum / n, t = seconds_since(start);
  return {n > 0 && p >= 40.0 && s >= 0.99 && t <= 120.0,
          fmt("PSNR %.2f dB, SSIM %.6f over %d frames, %.1fs", p, s, n, t)};
}

Outcome round_trip_interpolation() {
  const auto records = bundled_records(Protocol::Skip1, 0.2);
  const ThresholdModel c(0.2);
  double ours = 0.0, naive = 0.0;
  int n = 0;
  for (const auto& r : records) {
    const InputPair pair = r.pair();
    const GroundTruth& g = r.ground_truth.front();
    Raster average = pair.first().frame.raster();
    for (std::size_t i = 0; i < average.size(); ++i) {
      average[i] = 0.5 * (average[i] + pair.second().frame[i]);
    }
    ours += psnr(reconstruct_latent(pair, g.timestamp, c), g.frame);
    naive += psnr(average, g.frame.raster());
    ++n;
  }
  ours /= n;
  naive /= n;
  return {n > 0 && ours >= 35.0 && ours - naive >= 6.0,
          fmt("PSNR %.2f dB vs naive %.2f dB (+%.2f) over %d sets", ours, naive, ours - naive, n)};
}

Outcome reblur_consistency() {
  const auto records = bundled_records(Protocol::Deblur, 0.2);
  const ThresholdModel c(0.2);
  double err = 0.0;
  int n = 0;
  for (const auto& r : records) {
    if (!r.has_pair()) continue;
    const InputPair pair = r.pair();
    for (const BlurryObservation* b : {&pair.first(), &pair.second()}) {
      const Frame re = reblur(reconstruct_video(pair, exposure_grid(b->window, 49), c));
      double acc = 0.0;
      for (std::size_t i = 0; i < re.size(); ++i) acc += std::abs(re[i] - b->frame[i]) / b->frame[i];
      err += acc / static_cast<double>(re.size());
      ++n;
    }
  }
  err /= n;
  return {n > 0 && err <= 0.005, fmt("mean abs rel error %.4f%% over %d exposures", 100 * err, n)};
}

Outcome loss_nullity() {
  const EventStream none(32, 32, {0.0, 3.0}, {});
  const InputPair still({Frame(32, 32, 0.37), ExposureWindow(0.0, 1.0)},
                        {Frame(32, 32, 0.37), ExposureWindow(2.0, 1.0)}, none);
  bool zero = true;
  for (double f : {0.0, 0.5, 1.5, 3.0}) {
    const LossReport r = total_loss(still, f, ThresholdModel(0.2), LossWeights{}, 7);
    zero = zero && r.l_be == 0.0 && r.l_bs == 0.0 && r.l_se == 0.0;
  }
  const auto records = bundled_records(Protocol::Deblur, 0.2);
  const ThresholdModel c(0.2);
  double be = 0.0, bs = 0.0, se = 0.0;
  for (const auto& r : records) {
    if (!r.has_pair()) continue;
    const InputPair pair = r.pair();
    for (double f : exposure_grid(ExposureWindow(pair.timeline().begin(),
                                                 pair.timeline().total_duration()), 5)) {
      be = std::max(be, blurry_event_loss(pair, f, c));
    }
    const GridLosses g = grid_losses(pair, 49, c);
    bs = std::max(bs, g.l_bs);
    se = std::max(se, g.l_se);
  }
  return {zero && be <= 1e-3 && bs <= 1e-3 && se <= 1e-2,
          fmt("static: %s; true c: L_BE %.3g, L_BS %.3g (49 latents/exposure), L_SE %.3g",
              zero ? "all exactly 0" : "NONZERO", be, bs, se)};
}

Outcome threshold_calibration() {
  const auto start = Clock::now();
  std::string detail;
  bool pass = true;
  for (double truth : {0.2, 0.5}) {
    std::vector<InputPair> pairs;
    for (const auto& r : bundled_records(Protocol::Deblur, truth)) {
      if (r.has_pair()) pairs.push_back(r.pair());
    }
    CalibrationConfig config;
    config.c_min = 0.05;
    config.c_max = 1.0;
    const CalibrationResult res = calibrate_threshold(pairs, config);
    const double err = res.c_star / truth - 1.0;
    pass = pass && res.identifiable && std::abs(err) <= 0.05;
    detail += fmt("c*=%.2f -> %.5f (%+.2f%%); ", truth, res.c_star, 100 * err);
  }
  const double t = seconds_since(start);
  return {pass && t <= 300.0, detail + fmt("%.1fs", t)};
}

Outcome crossing_exactness() {
  std::string detail;
  bool pass = true;
  for (int k : {1, 3, 10}) {
    const double c = 0.2;
    std::vector<Frame> frames;
    const std::size_t count = 23;
    for (std::size_t i = 0; i < count; ++i) {
      Raster r(2, 3);
      for (std::size_t p = 0; p < r.size(); ++p) {
        const double base = std::log(0.05 + 0.1 * static_cast<double>(p));
        const double s = k * c * static_cast<double>(i) / static_cast<double>(count - 1);
        r[p] = std::exp(p % 2 ? base + s : base + k * c - s);
      }
      frames.emplace_back(std::move(r));
    }
    SimConfig config;
    config.c = c;
    const EventStream s = simulate_events(SharpSequence(frames, 0.01), config);
    std::vector<int> per_pixel(6, 0);
    for (const auto& e : s.events()) per_pixel[e.y * 3 + e.x] += 1;
    bool exact = true;
    for (int n : per_pixel) exact = exact && n == k;
    pass = pass && exact;
    detail += fmt("k=%d: %s; ", k, exact ? "exact" : "MISMATCH");
  }
  return {pass, detail.substr(0, detail.size() - 2)};
}

Outcome metric_sanity() {
  const double p20 = psnr(Raster(32, 32, 0.4), Raster(32, 32, 0.5));
  const double p48 = psnr(Raster(32, 32, 0.4), Raster(32, 32, 0.4 + 1.0 / 255.0));
  std::mt19937_64 rng(9009);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    Raster a(48, 48);
    for (double& v : a.values()) v = u(rng);
    worst = std::max(worst, std::abs(ssim(a, a) - 1.0));
  }
  return {std::abs(p20 - 20.0) <= 0.01 && std::abs(p48 - 48.13) <= 0.01 && worst <= 1e-12,
          fmt("PSNR %.4f / %.4f dB, max |ssim(a,a)-1| %.2g over 50 frames", p20, p48, worst)};
}

int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream bytes;
    bytes << in.rdbuf();
    files[fs::relative(entry.path(), root).string()] = bytes.str();
  }
  return files;
}

Outcome determinism(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "evblur_acceptance_pipeline";
  fs::remove_all(root);
  const std::string d = root.string();
  const std::vector<std::string> steps{
      "simulate --bundled --noise-rate 2 --seed 7 --output " + d + "/data",
      "reconstruct --manifest " + d + "/data/manifest.jsonl --at-ground-truth --pgm --output " + d +
          "/recon",
      "evaluate --manifest " + d + "/data/manifest.jsonl --reconstructions " + d +
          "/recon/reconstructions.jsonl --output " + d + "/eval",
      "calibrate --manifest " + d + "/data/manifest.jsonl --output " + d + "/calib",
  };
  std::map<std::string, std::string> runs[2];
  for (auto& run : runs) {
    for (const auto& step : steps) {
      if (run_cli(cli, step) != 0) return {false, "pipeline step failed: " + step};
    }
    run = snapshot(root);
  }
  std::size_t differing = 0;
  for (const auto& [name, bytes] : runs[0]) {
    const auto it = runs[1].find(name);
    differing += it == runs[1].end() || it->second != bytes;
  }
  differing += runs[1].size() - std::min(runs[1].size(), runs[0].size());
  return {differing == 0 && !runs[0].empty(),
          fmt("%zu artifacts compared, %zu differ", runs[0].size(), differing)};
}

} // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <evblur-cli>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"decomposition identity", decomposition_identity},
      {"reversal operator vs Riemann sum", reversal_operator},
      {"round-trip deblurring", round_trip_deblur},
      {"round-trip interpolation (skip1)", round_trip_interpolation},
      {"reblur consistency", reblur_consistency},
      {"loss nullity", loss_nullity},
      {"threshold calibration", threshold_calibration},
      {"simulator crossing exactness", crossing_exactness},
      {"metric sanity", metric_sanity},
      {"pipeline determinism", [&] { return determinism(cli); }},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %2zu %s: %s (%s)\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
