// cwvocoder: command-line front end.
//
// Exit codes: 0 success, 2 input/format error, 3 output error, 4 processing
// failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cwvocoder/decomposition.hpp"
#include "cwvocoder/error.hpp"
#include "cwvocoder/io.hpp"
#include "cwvocoder/metrics.hpp"
#include "cwvocoder/pipeline.hpp"
#include "cwvocoder/wavelet.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kInput = 2, kOutput = 3, kProcessing = 4 };

// Distinguishes failures on the way in from failures on the way out.
struct InputError : cwv::Error {
  using Error::Error;
};
struct OutputError : cwv::Error {
  using Error::Error;
};

template <typename Fn>
auto reading(Fn&& fn) {
  try {
    return fn();
  } catch (const cwv::FormatError& e) {
    throw InputError(e.what());
  } catch (const cwv::IoError& e) {
    throw InputError(e.what());
  } catch (const cwv::InvalidArgument& e) {
    throw InputError(e.what());
  }
}

template <typename Fn>
void writing(Fn&& fn) {
  try {
    fn();
  } catch (const cwv::IoError& e) {
    throw OutputError(e.what());
  }
}

cwv::Waveform load_wav(const fs::path& p) {
  return reading([&] {
    auto w = cwv::read_wav(p);
    cwv::validate(w);
    return w;
  });
}

std::vector<fs::path> wav_files(const fs::path& p) {
  std::vector<fs::path> out;
  if (fs::is_directory(p)) {
    for (const auto& e : fs::directory_iterator(p))
      if (e.is_regular_file() && e.path().extension() == ".wav") out.push_back(e.path());
  } else if (fs::is_regular_file(p)) {
    out.push_back(p);
  } else {
    throw InputError("no such file or directory: " + p.string());
  }
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return out;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results are written by
// index so output order never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Options {
  cwv::RunConfig run;
  std::string scale_weights;
  bool cwt_roundtrip = false;
  bool report = false;
  bool json = false;
  unsigned jobs = 1;
};

void add_analysis_flags(CLI::App* app, Options& o) {
  app->add_option("--order", o.run.order, "mel-cepstral order")->capture_default_str();
  app->add_option("--alpha", o.run.alpha, "frequency warping factor")->capture_default_str();
  app->add_option("--f0-floor", o.run.f0_floor, "lowest F0 in Hz")->capture_default_str();
  app->add_option("--f0-ceil", o.run.f0_ceil, "highest F0 in Hz")->capture_default_str();
  app->add_option("--base-scale", o.run.base_scale, "finest wavelet scale in frames")
      ->capture_default_str();
  app->add_option("--num-scales", o.run.num_scales, "number of octave scales")
      ->capture_default_str();
  app->add_option("--drop-finest", o.run.drop_finest, "finest scales removed from raw F0")
      ->capture_default_str();
}

void add_synthesis_flags(CLI::App* app, Options& o) {
  app->add_option("--seed", o.run.noise_seed, "noise seed")->capture_default_str();
  app->add_option("--noise-gain", o.run.noise_gain, "noise level above MVF")
      ->capture_default_str();
}

json report_json(const std::string& name, const cwv::EvaluationReport& r) {
  return {{"utterance", name},
          {"mcd_db", r.mcd_db},
          {"f0_rmse_hz", r.f0_rmse_hz},
          {"num_frames", r.num_frames}};
}

json summary_json(const std::vector<double>& values) {
  const auto s = cwv::summarize(values);
  return {{"n", s.n}, {"mean", s.mean}, {"ci95", s.ci95}};
}

std::optional<cwv::ScaleWeights> parse_weights(const Options& o) {
  if (o.scale_weights.empty()) return std::nullopt;
  auto w = reading([&] { return cwv::parse_scale_weights(o.scale_weights); });
  if (w.weights.size() != o.run.num_scales)
    throw InputError("--scale-weights: expected " + std::to_string(o.run.num_scales) +
                     " weights, got " + std::to_string(w.weights.size()));
  return w;
}

// -- commands -----------------------------------------------------------------------

void cmd_analyze(const Options& o, const fs::path& in, const fs::path& out) {
  const auto wave = load_wav(in);
  const auto f = cwv::analyze_utterance(wave, cwv::analysis_config(o.run));
  writing([&] { cwv::write_features(out, f); });
  std::printf("num_frames %zu\n", f.num_frames());
  std::printf("parameters_per_frame %zu (stored %zu including c0)\n", f.advertised_dimension(),
              f.stored_dimension());
}

void cmd_synth(const Options& o, const fs::path& in, const fs::path& proto, const fs::path& out) {
  const auto f = reading([&] { return cwv::read_features(in); });
  const auto p = reading([&] { return cwv::read_prototype(proto); });
  auto cfg = cwv::synthesis_config(o.run);
  cfg.alpha = f.melcep.alpha;
  const auto r = cwv::synthesize(f, p, cfg);
  writing([&] { cwv::write_wav(out, r.waveform); });
  std::printf("samples %zu\n", r.waveform.samples.size());
}

void cmd_copysyn(const Options& o, const fs::path& in, const fs::path& out,
                 const std::string& proto) {
  const auto wave = load_wav(in);
  cwv::CopySynthesisOptions opt;
  opt.cwt_roundtrip = o.cwt_roundtrip;
  opt.scale_weights = parse_weights(o);
  opt.report = o.report;
  if (!proto.empty()) opt.prototype = reading([&] { return cwv::read_prototype(proto); });
  const auto r = cwv::copy_synthesize(wave, o.run, opt);
  writing([&] { cwv::write_wav(out, r.synthesis.waveform); });
  if (r.report) std::cout << report_json(in.stem().string(), *r.report).dump() << "\n";
}

void cmd_decompose(const Options& o, const fs::path& in, const std::string& track,
                   const fs::path& out) {
  const auto f = reading([&] { return cwv::read_features(in); });
  const auto d = cwv::decompose_features(f, cwv::feature_ladder(o.run));
  const auto& w = reading([&]() -> const cwv::WaveletDecomposition& {
    return cwv::track_by_name(d, track);
  });
  writing([&] {
    std::ofstream os(out);
    if (!os) throw cwv::IoError("cannot open " + out.string() + " for writing");
    cwv::write_decomposition_csv(os, w);
    if (!os) throw cwv::IoError("failed writing " + out.string());
  });
}

// Scalogram of the waveform itself: finest scale one sample, whose response
// peaks near 3.6 kHz at 16 kHz; ten octaves reach down to about 7 Hz.
constexpr double kScalogramBaseScale = 1.0;

void cmd_scalogram(const Options& o, const fs::path& in, const fs::path& out) {
  const auto wave = load_wav(in);
  const auto ladder = cwv::make_scale_ladder(kScalogramBaseScale, o.run.num_scales);
  const auto w = cwv::cwt_forward(wave.samples, ladder);
  writing([&] {
    std::ofstream os(out);
    if (!os) throw cwv::IoError("cannot open " + out.string() + " for writing");
    cwv::write_decomposition_csv(os, w, /*magnitude=*/true);
    if (!os) throw cwv::IoError("failed writing " + out.string());
  });
}

int cmd_eval(const Options& o, const fs::path& ref, const fs::path& syn) {
  const auto refs = wav_files(ref);
  const auto syns = wav_files(syn);
  std::map<std::string, fs::path> by_name;
  for (const auto& s : syns) by_name[s.filename().string()] = s;

  std::vector<std::pair<fs::path, fs::path>> pairs;
  std::size_t unmatched = 0;
  for (const auto& r : refs) {
    auto it = by_name.find(r.filename().string());
    // A single file on each side is compared regardless of name.
    if (it == by_name.end() && refs.size() == 1 && syns.size() == 1) it = by_name.begin();
    if (it == by_name.end()) {
      std::fprintf(stderr, "warning: no counterpart for %s, skipped\n", r.filename().c_str());
      ++unmatched;
      continue;
    }
    pairs.emplace_back(r, it->second);
    by_name.erase(it);
  }
  for (const auto& [name, path] : by_name) {
    std::fprintf(stderr, "warning: no counterpart for %s, skipped\n", name.c_str());
    ++unmatched;
  }

  std::vector<cwv::EvaluationReport> reports(pairs.size());
  const auto acfg = cwv::analysis_config(o.run);
  parallel_for(pairs.size(), o.jobs, [&](std::size_t i) {
    const auto a = load_wav(pairs[i].first);
    const auto b = load_wav(pairs[i].second);
    reports[i] = cwv::evaluate_pair(a, b, acfg);
  });

  std::vector<double> mcds, rmses;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto name = pairs[i].first.stem().string();
    const auto& r = reports[i];
    mcds.push_back(r.mcd_db);
    rmses.push_back(r.f0_rmse_hz);
    if (o.json)
      std::cout << report_json(name, r).dump() << "\n";
    else
      std::printf("%-24s mcd %.4f dB  f0_rmse %.4f Hz  frames %zu\n", name.c_str(), r.mcd_db,
                  r.f0_rmse_hz, r.num_frames);
  }
  const json summary = {{"summary",
                         {{"n", pairs.size()},
                          {"unmatched", unmatched},
                          {"mcd_db", summary_json(mcds)},
                          {"f0_rmse_hz", summary_json(rmses)}}}};
  if (o.json) {
    std::cout << summary.dump() << "\n";
  } else {
    const auto m = cwv::summarize(mcds);
    const auto f = cwv::summarize(rmses);
    std::printf("n %zu  unmatched %zu\nmcd %.4f +/- %.4f dB\nf0_rmse %.4f +/- %.4f Hz\n",
                pairs.size(), unmatched, m.mean, m.ci95, f.mean, f.ci95);
  }
  return pairs.empty() ? kInput : kOk;
}

void cmd_train(const Options& o, const fs::path& corpus, const fs::path& out,
               std::size_t components) {
  const auto files = wav_files(corpus);
  if (files.empty()) throw InputError("no WAV files in " + corpus.string());
  std::vector<cwv::TrainingUtterance> utts(files.size());
  const auto acfg = cwv::analysis_config(o.run);
  parallel_for(files.size(), o.jobs, [&](std::size_t i) {
    utts[i].waveform = load_wav(files[i]);
    utts[i].features = cwv::analyze_utterance(utts[i].waveform, acfg);
  });
  const auto t = cwv::train_residual_prototype(utts, 512, components, cwv::synthesis_config(o.run));
  writing([&] { cwv::write_prototype(out, t.prototype); });
  std::printf("residual_frames %zu\n", t.frames_used);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous wavelet vocoder"};
  app.require_subcommand(1);
  Options o;
  std::string in, out, aux, track;
  std::size_t components = 1;

  auto* analyze = app.add_subcommand("analyze", "extract contF0, MVF and mel-cepstrum");
  analyze->add_option("input", in, "16 kHz mono PCM16 WAV")->required();
  analyze->add_option("output", out, "feature file (.cwvf)")->required();
  add_analysis_flags(analyze, o);

  auto* synth = app.add_subcommand("synth", "synthesize a waveform from a feature file");
  synth->add_option("features", in, "feature file (.cwvf)")->required();
  synth->add_option("prototype", aux, "residual prototype (.cwrp)")->required();
  synth->add_option("output", out, "output WAV")->required();
  add_synthesis_flags(synth, o);

  auto* copysyn = app.add_subcommand("copysyn", "analyze and resynthesize in one pass");
  copysyn->add_option("input", in, "16 kHz mono PCM16 WAV")->required();
  copysyn->add_option("output", out, "output WAV")->required();
  copysyn->add_option("--prototype", aux, "residual prototype (.cwrp)");
  copysyn->add_flag("--cwt-roundtrip", o.cwt_roundtrip, "decompose and recompose all tracks");
  copysyn->add_option("--scale-weights", o.scale_weights, "per-scale weights w1,...,wN");
  copysyn->add_flag("--report", o.report, "print MCD and F0 RMSE against the input as JSON");
  add_analysis_flags(copysyn, o);
  add_synthesis_flags(copysyn, o);

  auto* decompose = app.add_subcommand("decompose", "wavelet decomposition of one feature track");
  decompose->add_option("features", in, "feature file (.cwvf)")->required();
  decompose->add_option("--track", track, "contf0, mvf or mcep<k>")->required();
  decompose->add_option("output", out, "CSV matrix")->required();
  add_analysis_flags(decompose, o);

  auto* scalogram = app.add_subcommand("scalogram", "wavelet magnitudes of a waveform");
  scalogram->add_option("input", in, "16 kHz mono PCM16 WAV")->required();
  scalogram->add_option("output", out, "CSV matrix")->required();
  scalogram->add_option("--num-scales", o.run.num_scales, "number of octave scales")
      ->capture_default_str();

  auto* eval = app.add_subcommand("eval", "MCD and F0 RMSE between paired WAV files");
  eval->add_option("reference", in, "reference WAV or directory")->required();
  eval->add_option("synthesized", aux, "synthesized WAV or directory")->required();
  eval->add_flag("--json", o.json, "JSON lines output");
  eval->add_option("--jobs", o.jobs, "worker threads")->capture_default_str();
  add_analysis_flags(eval, o);

  auto* train = app.add_subcommand("train-prototype", "train a residual prototype");
  train->add_option("corpus", in, "directory of WAV files")->required();
  train->add_option("output", out, "prototype file (.cwrp)")->required();
  train->add_option("--components", components, "principal components kept")
      ->capture_default_str();
  train->add_option("--jobs", o.jobs, "worker threads")->capture_default_str();
  add_analysis_flags(train, o);
  add_synthesis_flags(train, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  try {
    cwv::validate(o.run);
  } catch (const cwv::InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInput;
  }

  try {
    if (*analyze) cmd_analyze(o, in, out);
    else if (*synth) cmd_synth(o, in, aux, out);
    else if (*copysyn) cmd_copysyn(o, in, out, aux);
    else if (*decompose) cmd_decompose(o, in, track, out);
    else if (*scalogram) cmd_scalogram(o, in, out);
    else if (*eval) return cmd_eval(o, in, aux);
    else if (*train) cmd_train(o, in, out, components);
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInput;
  } catch (const OutputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kOutput;
  } catch (const cwv::InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInput;
  } catch (const cwv::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kProcessing;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kProcessing;
  }
  return kOk;
}
