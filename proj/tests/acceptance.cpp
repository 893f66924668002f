// Acceptance harness: one PASS/FAIL line per criterion, exit 0 only if all
// pass. argv[1] = repository root (for the README check), argv[2] = scratch
// directory (created fresh; defaults to a temp subdirectory).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "neurobeat/checkpoint.hpp"
#include "neurobeat/cli.hpp"
#include "neurobeat/eval.hpp"
#include "neurobeat/filter.hpp"
#include "neurobeat/io.hpp"
#include "neurobeat/loss.hpp"
#include "neurobeat/model.hpp"
#include "neurobeat/peak_pick.hpp"
#include "neurobeat/report.hpp"
#include "neurobeat/rng.hpp"
#include "neurobeat/types.hpp"

namespace fs = std::filesystem;
using namespace neurobeat;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// ------------------------------------------------------------------ 1

// Exhaustive maximum bipartite matching by memoized bitmask recursion;
// independent of the production Kuhn implementation.
std::size_t brute_force_matching(const std::vector<double>& ref, const std::vector<double>& est,
                                 double tol) {
  const std::size_t n_ref = ref.size();
  const std::size_t n_est = est.size();
  std::vector<int> memo(n_ref == 0 ? 0 : (n_ref << n_est), -1);
  std::function<int(std::size_t, unsigned)> best = [&](std::size_t i, unsigned used) -> int {
    if (i == n_ref) return 0;
    int& slot = memo[(i << n_est) + used];
    if (slot >= 0) return slot;
    int value = best(i + 1, used);  // leave ref[i] unmatched
    for (std::size_t j = 0; j < n_est; ++j) {
      if ((used >> j) & 1U) continue;
      if (std::abs(ref[i] - est[j]) <= tol) {
        value = std::max(value, 1 + best(i + 1, used | (1U << j)));
      }
    }
    slot = value;
    return value;
  };
  return n_ref == 0 ? 0 : static_cast<std::size_t>(best(0, 0));
}

std::vector<double> random_timestamps(SplitMix64& rng, std::size_t max_count) {
  std::vector<double> out(rng.next_below(max_count + 1));
  for (double& t : out) t = rng.next_uniform(0.0, 10.0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool criterion_matching_oracle() {
  const Clock::time_point t0 = Clock::now();
  SplitMix64 rng{7101};
  const double tolerances[] = {0.05, 0.1, 0.25};
  for (int instance = 0; instance < 200; ++instance) {
    OnsetAnnotation ref{random_timestamps(rng, 8)};
    OnsetAnnotation est{random_timestamps(rng, 8)};
    const double tol = tolerances[rng.next_below(3)];
    const auto pairs = match_onsets(ref, est, tol);
    // every pair must be within tolerance with no index reused
    std::vector<bool> ref_used(ref.times_s.size(), false);
    std::vector<bool> est_used(est.times_s.size(), false);
    for (const auto& [i, j] : pairs) {
      if (std::abs(ref.times_s[static_cast<std::size_t>(i)] -
                   est.times_s[static_cast<std::size_t>(j)]) > tol) {
        return false;
      }
      if (ref_used[static_cast<std::size_t>(i)] || est_used[static_cast<std::size_t>(j)]) {
        return false;
      }
      ref_used[static_cast<std::size_t>(i)] = est_used[static_cast<std::size_t>(j)] = true;
    }
    if (pairs.size() != brute_force_matching(ref.times_s, est.times_s, tol)) {
      return false;
    }
  }
  return seconds_since(t0) < 5.0;
}

// ------------------------------------------------------------------ 2

// Central differences over every coordinate of a small model, two seeded
// instances per architecture (>= 200 distinct probes each).
double gradcheck_worst(Arch arch, uint64_t seed) {
  ModelDims d;
  d.input_channels = 5;
  d.window_len = 7;
  d.hidden = 4;
  d.layers = arch == Arch::fcn ? 1 : 2;

  SplitMix64 rng{seed};
  std::vector<WindowPair> batch(3);
  for (WindowPair& pair : batch) {
    pair.eeg.resize(d.input_channels, d.window_len);
    for (long c = 0; c < d.input_channels; ++c) {
      for (long t = 0; t < d.window_len; ++t) pair.eeg(c, t) = rng.next_gaussian();
    }
    pair.target.resize(d.window_len);
    for (long t = 0; t < d.window_len; ++t) pair.target(t) = rng.next_unit() < 0.3 ? 1.0 : 0.0;
  }
  std::vector<const WindowPair*> ptrs;
  for (const WindowPair& pair : batch) ptrs.push_back(&pair);

  const Eigen::VectorXd params = init_params(arch, d, seed + 1);
  Eigen::VectorXd grad;
  model_loss_and_gradient(arch, d, params, ptrs, grad);

  const double h = 1e-5;
  double worst = 0.0;
  Eigen::VectorXd scratch;
  for (long idx = 0; idx < params.size(); ++idx) {
    Eigen::VectorXd bumped = params;
    bumped(idx) = params(idx) + h;
    const double up = model_loss_and_gradient(arch, d, bumped, ptrs, scratch);
    bumped(idx) = params(idx) - h;
    const double down = model_loss_and_gradient(arch, d, bumped, ptrs, scratch);
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(grad(idx)), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(grad(idx) - numeric) / denom);
  }
  return worst;
}

bool criterion_gradients(std::string& detail) {
  const Clock::time_point t0 = Clock::now();
  double worst_fcn = 0.0;
  double worst_gru = 0.0;
  for (uint64_t seed : {11ULL, 23ULL}) {
    worst_fcn = std::max(worst_fcn, gradcheck_worst(Arch::fcn, seed));
    worst_gru = std::max(worst_gru, gradcheck_worst(Arch::gru, seed));
  }
  std::ostringstream msg;
  msg << "max rel err fcn " << worst_fcn << ", gru " << worst_gru;
  detail = msg.str();
  return worst_fcn < 1e-4 && worst_gru < 1e-4 && seconds_since(t0) < 30.0;
}

// ------------------------------------------------------------------ 3

double probe_gain(const FilterSpec& spec, double freq_hz, double sr) {
  const long n = static_cast<long>(std::lround(60.0 * sr));
  std::vector<double> x(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] =
        freq_hz == 0.0 ? 1.0 : std::sin(2.0 * M_PI * freq_hz * static_cast<double>(i) / sr);
  }
  const std::vector<double> y = zero_phase_channel(x, spec);
  double num = 0.0;
  double den = 0.0;
  for (long i = n / 4; i < 3 * n / 4; ++i) {  // central half avoids edge transients
    num += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    den += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
  }
  return std::sqrt(num / den);
}

bool criterion_filter(std::string& detail) {
  const Clock::time_point t0 = Clock::now();
  const double sr = 125.0;
  const FilterSpec spec = design_bandpass(0.1, 40.0, 4, sr);
  const double g10 = probe_gain(spec, 10.0, sr);
  const double g55 = probe_gain(spec, 55.0, sr);
  const double dc = probe_gain(spec, 0.0, sr);
  std::ostringstream msg;
  msg << "gain(10 Hz) " << g10 << ", gain(55 Hz) " << g55 << ", DC residual " << dc;
  detail = msg.str();
  return g10 >= 0.9 && g10 <= 1.0 && g55 <= 0.25 && dc <= 0.05 && seconds_since(t0) < 5.0;
}

// ------------------------------------------------------------------ 4

// Replays the three conditions from their definitions, left to right.
std::vector<long> replay_peaks(const std::vector<double>& curve, const PeakPickConfig& cfg) {
  const long n = static_cast<long>(curve.size());
  std::vector<long> emitted;
  long last = -1;
  for (long i = 0; i < n; ++i) {
    if (last >= 0 && i - last < cfg.w5) continue;  // (c)
    double local_max = curve[static_cast<std::size_t>(i)];
    for (long j = std::max<long>(0, i - cfg.w1); j <= std::min(n - 1, i + cfg.w2); ++j) {
      local_max = std::max(local_max, curve[static_cast<std::size_t>(j)]);
    }
    if (curve[static_cast<std::size_t>(i)] < local_max) continue;  // (a)
    double sum = 0.0;
    long count = 0;
    for (long j = std::max<long>(0, i - cfg.w3); j <= std::min(n - 1, i + cfg.w4); ++j) {
      sum += curve[static_cast<std::size_t>(j)];
      ++count;
    }
    if (curve[static_cast<std::size_t>(i)] <
        sum / static_cast<double>(count) + cfg.delta) {  // (b)
      continue;
    }
    emitted.push_back(i);
    last = i;
  }
  return emitted;
}

bool criterion_peak_picker() {
  SplitMix64 rng{4242};
  const PeakPickConfig cfg;  // published defaults
  const double frame_rate = 125.0;
  for (int curve_idx = 0; curve_idx < 100; ++curve_idx) {
    const std::size_t n = 80 + rng.next_below(400);
    std::vector<double> curve(n);
    for (double& v : curve) v = rng.next_unit();
    const OnsetAnnotation onsets = peak_pick(curve, frame_rate, cfg);
    std::vector<long> emitted;
    for (double t : onsets.times_s) emitted.push_back(std::lround(t * frame_rate));
    if (emitted != replay_peaks(curve, cfg)) return false;
  }
  return true;
}

// ------------------------------------------------------------------ 5

bool criterion_tolerance_monotonic() {
  SplitMix64 rng{5151};
  for (int instance = 0; instance < 100; ++instance) {
    OnsetAnnotation ref{random_timestamps(rng, 30)};
    OnsetAnnotation est{random_timestamps(rng, 30)};
    if (ref.times_s.empty()) ref.times_s.push_back(rng.next_uniform(0.0, 10.0));
    if (est.times_s.empty()) est.times_s.push_back(rng.next_uniform(0.0, 10.0));
    const std::vector<SweepRow> sweep = tolerance_sweep(ref, est);
    if (sweep.size() != 8) return false;
    for (std::size_t k = 1; k < sweep.size(); ++k) {
      if (sweep[k].metrics.f_measure < sweep[k - 1].metrics.f_measure - 1e-12) return false;
    }
  }
  return true;
}

// ------------------------------------------------------------------ 6

struct MethodScore {
  double mean_f{0.0};
  int rows{0};
};

std::map<std::string, MethodScore> mean_f_by_method(const std::vector<MetricsRow>& rows) {
  std::map<std::string, MethodScore> scores;
  for (const MetricsRow& row : rows) {
    scores[row.method].mean_f += row.metrics.f_measure;
    scores[row.method].rows += 1;
  }
  for (auto& [method, score] : scores) score.mean_f /= static_cast<double>(score.rows);
  return scores;
}

bool criterion_end_to_end(const fs::path& scratch, std::string& detail) {
  const fs::path root = scratch / "pipeline";
  const fs::path data = root / "data";
  const fs::path prep = root / "prep";
  const fs::path models = root / "models";
  const fs::path acts = root / "acts";
  const fs::path est_gru = root / "est_gru";
  const fs::path est_dummy = root / "est_dummy";
  const fs::path metrics = root / "metrics.csv";
  fs::create_directories(root);

  // Progress (train's per-epoch log) stays on stderr; subcommand stdout is
  // suppressed so the PASS/FAIL lines stay readable.
  auto run = [](std::vector<std::string> args) {
    std::ostringstream sink;
    std::streambuf* old = std::cout.rdbuf(sink.rdbuf());
    const int code = run_command(args);
    std::cout.rdbuf(old);
    return code == 0;
  };
  if (!run({"synth", "--subjects", "6", "--songs", "3", "--duration", "60", "--channels", "125",
            "--rate", "125", "--bpm", "100", "--jitter", "0.02", "--snr", "0", "--kernel",
            "damped_sine", "--seed", "42", "--out", data.string()})) {
    detail = "synth failed";
    return false;
  }
  if (!run({"preprocess", "--manifest", (data / "manifest.json").string(), "--out", prep.string(),
            "--threads", "1"})) {
    detail = "preprocess failed";
    return false;
  }
  if (!run({"train", "--manifest", (prep / "manifest.json").string(), "--out", models.string(),
            "--arch", "gru", "--epochs", "50", "--lr", "0.001", "--folds", "6", "--seed", "42",
            "--pos-weight", "4", "--widen", "2", "--threads", "1"})) {
    detail = "train failed";
    return false;
  }
  if (!run({"predict", "--manifest", (prep / "manifest.json").string(), "--models",
            models.string(), "--out", acts.string()})) {
    detail = "predict failed";
    return false;
  }
  if (!run({"detect", "--activations", acts.string(), "--out", est_gru.string()})) {
    detail = "detect failed";
    return false;
  }
  if (!run({"baseline", "--manifest", (prep / "manifest.json").string(), "--method", "dummy",
            "--out", est_dummy.string()})) {
    detail = "baseline failed";
    return false;
  }
  if (!run({"evaluate", "--manifest", (prep / "manifest.json").string(), "--estimates",
            "gru=" + est_gru.string(), "--estimates", "dummy=" + est_dummy.string(),
            "--tolerance", "0.1", "--out", metrics.string()})) {
    detail = "evaluate failed";
    return false;
  }

  const auto scores = mean_f_by_method(read_metrics_csv(metrics));
  const double f_gru = scores.at("gru").mean_f;
  const double f_dummy = scores.at("dummy").mean_f;

  // every fold must end below its first epoch's training loss
  std::ifstream hist(models / "loss_history.csv");
  std::string line;
  std::getline(hist, line);  // header
  bool losses_ok = true;
  std::map<long, std::map<long, double>> by_fold;
  while (std::getline(hist, line)) {
    std::istringstream row(line);
    std::string fold_s, epoch_s, loss_s;
    std::getline(row, fold_s, ',');
    std::getline(row, epoch_s, ',');
    std::getline(row, loss_s, ',');
    by_fold[std::stol(fold_s)][std::stol(epoch_s)] = std::stod(loss_s);
  }
  if (by_fold.size() != 6) losses_ok = false;
  for (const auto& [fold, epochs] : by_fold) {
    if (epochs.empty() || !(epochs.rbegin()->second < epochs.begin()->second)) losses_ok = false;
  }

  std::ostringstream msg;
  msg << "out-of-fold F " << f_gru << ", dummy F " << f_dummy << ", folds with decreasing loss "
      << (losses_ok ? "6/6" : "NOT all");
  detail = msg.str();
  return f_gru >= f_dummy + 0.15 && f_gru >= 0.5 && losses_ok;
}

// ------------------------------------------------------------------ 7

bool criterion_dummy() {
  const OnsetAnnotation onsets = dummy_detector(240.0);
  if (onsets.times_s.size() != 240) return false;
  for (std::size_t k = 0; k < onsets.times_s.size(); ++k) {
    if (onsets.times_s[k] != static_cast<double>(k)) return false;
  }
  return true;
}

// ------------------------------------------------------------------ 8

bool criterion_reference_mode(const fs::path& repo_root, std::string& detail) {
  const std::string readme = lowercase(slurp(repo_root / "README.md"));
  const bool in_readme = readme.find("reference mode") != std::string::npos &&
                         readme.find("nmed-t") != std::string::npos &&
                         readme.find("madmom") != std::string::npos;

  std::ostringstream captured;
  std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
  run_command({"--help"});
  std::cout.rdbuf(old);
  const std::string help = lowercase(captured.str());
  const bool in_cli = help.find("reference mode") != std::string::npos &&
                      help.find("nmed-t") != std::string::npos &&
                      help.find("madmom") != std::string::npos;

  detail = std::string("README ") + (in_readme ? "documents" : "MISSING") + ", CLI help " +
           (in_cli ? "documents" : "MISSING");
  return in_readme && in_cli;
}

// ------------------------------------------------------------------ 9

bool criterion_round_trips(const fs::path& scratch) {
  const fs::path dir = scratch / "roundtrip";
  fs::create_directories(dir);
  SplitMix64 rng{909};

  // EEG binary
  EegRecording rec;
  rec.subject_id = "s01";
  rec.song_id = "song01";
  rec.sample_rate_hz = 125.0;
  rec.channels = 3;
  rec.samples = 250;
  rec.data.resize(3, 250);
  for (long c = 0; c < 3; ++c) {
    for (long t = 0; t < 250; ++t) rec.data(c, t) = static_cast<float>(rng.next_gaussian());
  }
  write_eeg_binary(rec, dir / "a.eeg");
  const EegRecording rec2 = read_eeg_binary(dir / "a.eeg");
  if (rec2.data.rows() != rec.data.rows() || rec2.data.cols() != rec.data.cols()) return false;
  for (long c = 0; c < 3; ++c) {
    for (long t = 0; t < 250; ++t) {
      if (rec2.data(c, t) != rec.data(c, t)) return false;  // bit-exact floats
    }
  }
  write_eeg_binary(rec2, dir / "b.eeg");
  if (slurp(dir / "a.eeg") != slurp(dir / "b.eeg")) return false;

  // checkpoint
  ModelCheckpoint ckpt;
  ckpt.arch = Arch::gru;
  ckpt.dims = default_dims(Arch::gru);
  ckpt.dims.input_channels = 4;
  ckpt.dims.hidden = 5;
  ckpt.seed = 77;
  ckpt.epochs = 3;
  ckpt.weights = init_params(ckpt.arch, ckpt.dims, 77);
  write_checkpoint(ckpt, dir / "a.nbk");
  const ModelCheckpoint ckpt2 = read_checkpoint(dir / "a.nbk");
  if (ckpt2.weights.size() != ckpt.weights.size()) return false;
  for (long i = 0; i < ckpt.weights.size(); ++i) {
    if (ckpt2.weights(i) != ckpt.weights(i)) return false;
  }
  write_checkpoint(ckpt2, dir / "b.nbk");
  if (slurp(dir / "a.nbk") != slurp(dir / "b.nbk")) return false;

  // activation
  ActivationCurve curve;
  curve.sample_rate_hz = 125.0;
  curve.values.resize(500);
  for (double& v : curve.values) v = rng.next_unit();
  write_activation(curve, dir / "a.act");
  const ActivationCurve curve2 = read_activation(dir / "a.act");
  if (curve2.values != curve.values) return false;  // bit-exact doubles
  write_activation(curve2, dir / "b.act");
  if (slurp(dir / "a.act") != slurp(dir / "b.act")) return false;

  // metrics CSV determinism across repeated scoring runs
  OnsetAnnotation ref{{0.5, 1.2, 2.0, 3.3, 4.4}};
  OnsetAnnotation est{{0.52, 1.4, 2.01, 3.9}};
  auto rows_once = [&] {
    std::vector<MetricsRow> rows;
    for (double tol : {0.05, 0.1, 0.5}) {
      MetricsRow row;
      row.method = "gru";
      row.subject = "s01";
      row.song = "song01";
      row.tolerance_s = tol;
      row.metrics = score_onsets(ref, est, tol);
      rows.push_back(row);
    }
    return rows;
  };
  write_metrics_csv(rows_once(), dir / "m1.csv");
  write_metrics_csv(rows_once(), dir / "m2.csv");
  return !slurp(dir / "m1.csv").empty() && slurp(dir / "m1.csv") == slurp(dir / "m2.csv");
}

// ----------------------------------------------------------------- 10

bool criterion_bce_stability(std::string& detail) {
  auto loss_at = [](double logit, double target) {
    Eigen::ArrayXXd x(1, 1);
    Eigen::ArrayXXd y(1, 1);
    x(0, 0) = logit;
    y(0, 0) = target;
    return bce_with_logits(x, y);
  };
  const double tiny = std::exp(-100.0);
  const struct {
    double logit;
    double target;
    double expected;
  } cases[] = {
      {100.0, 1.0, tiny},
      {100.0, 0.0, 100.0 + tiny},
      {-100.0, 0.0, tiny},
      {-100.0, 1.0, 100.0 + tiny},
  };
  double worst = 0.0;
  for (const auto& c : cases) {
    const double got = loss_at(c.logit, c.target);
    if (!std::isfinite(got)) return false;
    worst = std::max(worst, std::abs(got - c.expected) / c.expected);
  }
  std::ostringstream msg;
  msg << "max rel err " << worst;
  detail = msg.str();
  return worst <= 1e-9;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path repo_root = argc > 1 ? fs::path(argv[1]) : fs::current_path();
  const fs::path scratch =
      argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "neurobeat_acceptance";
  // Development convenience only: `acceptance <root> <scratch> fast` skips the
  // long end-to-end criterion and exits nonzero so it can never read as a full
  // pass. The registered test always runs everything.
  const bool fast_mode = argc > 3 && std::string(argv[3]) == "fast";
  std::error_code ec;
  fs::remove_all(scratch, ec);
  fs::create_directories(scratch);

  int failures = 0;
  auto report = [&failures](int number, const std::string& text, bool ok,
                            const std::string& detail = {}) {
    std::printf("%s  %2d. %s%s%s\n", ok ? "PASS" : "FAIL", number, text.c_str(),
                detail.empty() ? "" : " — ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  };
  auto guarded = [](const std::function<bool()>& body, std::string& detail) {
    try {
      return body();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
      return false;
    }
  };

  std::string detail;

  detail.clear();
  report(1, "matching equals the exhaustive oracle on 200 seeded instances",
         guarded([&] { return criterion_matching_oracle(); }, detail), detail);

  detail.clear();
  report(2, "analytic gradients match central differences for FCN and GRU",
         guarded([&] { return criterion_gradients(detail); }, detail), detail);

  detail.clear();
  report(3, "default bandpass passes 10 Hz, rejects 55 Hz and DC",
         guarded([&] { return criterion_filter(detail); }, detail), detail);

  detail.clear();
  report(4, "peak picker emits exactly the indices satisfying (a)-(c) on 100 curves",
         guarded([&] { return criterion_peak_picker(); }, detail), detail);

  detail.clear();
  report(5, "F-measure is non-decreasing across the 8-window tolerance sweep",
         guarded([&] { return criterion_tolerance_monotonic(); }, detail), detail);

  detail.clear();
  report(7, "dummy baseline yields exactly 240 integer-second onsets for 240 s",
         guarded([&] { return criterion_dummy(); }, detail), detail);

  detail.clear();
  report(8, "reference mode (NMED-T + madmom) documented in README and CLI",
         guarded([&] { return criterion_reference_mode(repo_root, detail); }, detail), detail);

  detail.clear();
  report(9, "EEG/checkpoint/activation round-trip bit-exactly; metrics CSV deterministic",
         guarded([&] { return criterion_round_trips(scratch); }, detail), detail);

  detail.clear();
  report(10, "BCE at logits +-100 is finite and matches the closed form",
         guarded([&] { return criterion_bce_stability(detail); }, detail), detail);

  // The end-to-end surrogate runs last: it dominates the runtime.
  if (fast_mode) {
    std::printf("SKIP   6. end-to-end surrogate skipped (fast mode) — NOT a pass\n");
    return 1;
  }
  detail.clear();
  report(6, "synthetic end-to-end GRU beats dummy by 0.15 and reaches F >= 0.5",
         guarded([&] { return criterion_end_to_end(scratch, detail); }, detail), detail);

  if (failures == 0) {
    std::printf("ALL CRITERIA PASSED\n");
  } else {
    std::printf("%d CRITERIA FAILED\n", failures);
  }
  return failures == 0 ? 0 : 1;
}
