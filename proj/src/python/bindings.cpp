#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "cwvocoder/error.hpp"
#include "cwvocoder/io.hpp"
#include "cwvocoder/metrics.hpp"
#include "cwvocoder/pipeline.hpp"
#include "cwvocoder/wavelet.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw cwv::InvalidArgument("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

// Shape-container constructor: the count-only one mis-strides on older pybind11.
Array to_array(const std::vector<double>& v) {
  return Array(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())}, v.data());
}

Array to_matrix(const std::vector<double>& v, std::size_t rows, std::size_t cols) {
  return Array(std::vector<py::ssize_t>{static_cast<py::ssize_t>(rows), static_cast<py::ssize_t>(cols)},
               v.data());
}

cwv::MelCepstrumTrack melcep_from(const Array& m, double alpha) {
  if (m.ndim() != 2 || m.shape(1) < 1) throw cwv::InvalidArgument("expected a frames x (order+1) array");
  cwv::MelCepstrumTrack t;
  t.order = static_cast<std::size_t>(m.shape(1) - 1);
  t.alpha = alpha;
  t.grid.num_frames = static_cast<std::size_t>(m.shape(0));
  t.coefficients.assign(m.data(), m.data() + m.size());
  return t;
}

cwv::FrameTrack track_from(const Array& a, cwv::TrackKind kind) {
  cwv::FrameTrack t;
  t.kind = kind;
  t.values = to_vector(a);
  t.grid.num_frames = t.values.size();
  return t;
}

py::dict features_dict(const cwv::UtteranceFeatures& f) {
  const auto& m = f.melcep;
  return py::dict("contf0"_a = to_array(f.contf0.values), "mvf"_a = to_array(f.mvf.values),
                  "melcep"_a = to_matrix(m.coefficients, m.num_frames(), m.order + 1),
                  "alpha"_a = m.alpha, "frame_shift"_a = f.grid().frame_shift,
                  "sample_rate"_a = f.grid().sample_rate);
}

cwv::UtteranceFeatures features_from(const Array& contf0, const Array& mvf, const Array& melcep,
                                     double alpha) {
  cwv::UtteranceFeatures f;
  f.contf0 = track_from(contf0, cwv::TrackKind::ContF0);
  f.mvf = track_from(mvf, cwv::TrackKind::Mvf);
  f.melcep = melcep_from(melcep, alpha);
  cwv::validate(f);
  return f;
}

cwv::RunConfig run_config(double f0_floor, double f0_ceil, std::size_t order, double alpha,
                          double base_scale, std::size_t num_scales, std::size_t drop_finest,
                          std::uint64_t seed, double noise_gain) {
  cwv::RunConfig c;
  c.f0_floor = f0_floor;
  c.f0_ceil = f0_ceil;
  c.order = order;
  c.alpha = alpha;
  c.base_scale = base_scale;
  c.num_scales = num_scales;
  c.drop_finest = drop_finest;
  c.noise_seed = seed;
  c.noise_gain = noise_gain;
  cwv::validate(c);
  return c;
}

cwv::Waveform waveform_from(const Array& samples, double sample_rate) {
  cwv::Waveform w;
  w.samples = to_vector(samples);
  w.sample_rate = sample_rate;
  return w;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Continuous wavelet vocoder core";

  static py::exception<cwv::Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<cwv::InvalidArgument> invalid(m, "InvalidArgument", PyExc_ValueError);
  static py::exception<cwv::FormatError> format(m, "FormatError", error.ptr());
  static py::exception<cwv::TrainingFailure> training(m, "TrainingFailure", error.ptr());
  static py::exception<cwv::FilterInstability> instability(m, "FilterInstability", error.ptr());
  static py::exception<cwv::AlignmentFailure> alignment(m, "AlignmentFailure", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const cwv::InvalidArgument& e) {
      PyErr_SetString(invalid.ptr(), e.what());
    } catch (const cwv::FormatError& e) {
      PyErr_SetString(format.ptr(), e.what());
    } catch (const cwv::TrainingFailure& e) {
      PyErr_SetString(training.ptr(), e.what());
    } catch (const cwv::FilterInstability& e) {
      PyErr_SetString(instability.ptr(), e.what());
    } catch (const cwv::AlignmentFailure& e) {
      PyErr_SetString(alignment.ptr(), e.what());
    } catch (const cwv::IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const cwv::Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  m.def("mexican_hat", &cwv::mexican_hat, "t"_a, "Normalized Mexican hat wavelet.");

  m.def(
      "cwt_forward",
      [](const Array& signal, double base_scale, std::size_t num_scales) {
        const auto d = cwv::cwt_forward(to_vector(signal), cwv::make_scale_ladder(base_scale, num_scales));
        return py::dict("coefficients"_a = to_matrix(d.coefficients, d.num_scales(), d.signal_length),
                        "scales"_a = to_array(d.ladder.scales()), "mean"_a = d.signal_mean);
      },
      "signal"_a, "base_scale"_a = 2.0, "num_scales"_a = cwv::kDefaultNumScales,
      "Wavelet coefficients on an octave ladder: dict(coefficients, scales, mean).");

  m.def(
      "cwt_inverse",
      [](const Array& coefficients, double mean, double base_scale) {
        if (coefficients.ndim() != 2) throw cwv::InvalidArgument("expected a scales x samples array");
        cwv::WaveletDecomposition d;
        d.ladder = cwv::make_scale_ladder(base_scale, static_cast<std::size_t>(coefficients.shape(0)));
        d.signal_length = static_cast<std::size_t>(coefficients.shape(1));
        d.signal_mean = mean;
        d.coefficients.assign(coefficients.data(), coefficients.data() + coefficients.size());
        return to_array(cwv::cwt_inverse(d, cwv::calibrate_reconstruction_constant(d.ladder)));
      },
      "coefficients"_a, "mean"_a, "base_scale"_a = 2.0,
      "Scale-sum reconstruction with the calibrated constant.");

  m.def(
      "analyze",
      [](const Array& samples, double sample_rate, double f0_floor, double f0_ceil, std::size_t order,
         double alpha, double base_scale, std::size_t num_scales, std::size_t drop_finest) {
        const auto c = run_config(f0_floor, f0_ceil, order, alpha, base_scale, num_scales, drop_finest, 0, 1.0);
        return features_dict(cwv::analyze_utterance(waveform_from(samples, sample_rate), cwv::analysis_config(c)));
      },
      "samples"_a, "sample_rate"_a = 16000.0, "f0_floor"_a = 50.0, "f0_ceil"_a = 400.0, "order"_a = 24,
      "alpha"_a = 0.42, "base_scale"_a = 2.0, "num_scales"_a = cwv::kDefaultNumScales, "drop_finest"_a = 1,
      "Extract contF0, MVF and mel-cepstra from a 16 kHz waveform.");

  m.def(
      "synthesize",
      [](const Array& contf0, const Array& mvf, const Array& melcep, double alpha, std::uint64_t seed,
         double noise_gain) {
        auto c = run_config(50.0, 400.0, 24, alpha, 2.0, cwv::kDefaultNumScales, 1, seed, noise_gain);
        const auto r = cwv::synthesize(features_from(contf0, mvf, melcep, alpha), cwv::impulse_prototype(),
                                       cwv::synthesis_config(c));
        return to_array(r.waveform.samples);
      },
      "contf0"_a, "mvf"_a, "melcep"_a, "alpha"_a = 0.42, "seed"_a = 1234, "noise_gain"_a = 1.0,
      "Synthesize a waveform from feature tracks with an impulse prototype.");

  m.def(
      "copysyn",
      [](const Array& samples, std::uint64_t seed, double noise_gain, bool cwt_roundtrip,
         std::optional<std::vector<double>> scale_weights) {
        const auto c = run_config(50.0, 400.0, 24, 0.42, 2.0, cwv::kDefaultNumScales, 1, seed, noise_gain);
        cwv::CopySynthesisOptions o;
        o.cwt_roundtrip = cwt_roundtrip;
        if (scale_weights) o.scale_weights = cwv::ScaleWeights{*scale_weights};
        o.report = true;
        const auto r = cwv::copy_synthesize(waveform_from(samples, 16000.0), c, o);
        return py::make_tuple(to_array(r.synthesis.waveform.samples),
                              py::dict("mcd_db"_a = r.report->mcd_db, "f0_rmse_hz"_a = r.report->f0_rmse_hz,
                                       "num_frames"_a = r.report->num_frames));
      },
      "samples"_a, "seed"_a = 1234, "noise_gain"_a = 1.0, "cwt_roundtrip"_a = false,
      "scale_weights"_a = py::none(), "Analyze and resynthesize; returns (waveform, report).");

  m.def(
      "mcd",
      [](const Array& ref, const Array& syn, double alpha, bool include_gain) {
        return cwv::mcd(melcep_from(ref, alpha), melcep_from(syn, alpha), include_gain);
      },
      "ref"_a, "syn"_a, "alpha"_a = 0.42, "include_gain"_a = false, "Mel-cepstral distortion in dB.");

  m.def(
      "f0_rmse",
      [](const Array& ref, const Array& syn) {
        return cwv::f0_rmse(track_from(ref, cwv::TrackKind::ContF0), track_from(syn, cwv::TrackKind::ContF0));
      },
      "ref"_a, "syn"_a, "F0 RMSE in Hz.");

  m.def(
      "read_wav",
      [](const std::string& path) {
        const auto w = cwv::read_wav(std::filesystem::path(path));
        return py::make_tuple(to_array(w.samples), w.sample_rate);
      },
      "path"_a, "Read a 16 kHz mono PCM16 WAV as (samples, sample_rate).");

  m.def(
      "write_wav",
      [](const std::string& path, const Array& samples) {
        cwv::write_wav(std::filesystem::path(path), waveform_from(samples, 16000.0));
      },
      "path"_a, "samples"_a, "Write samples in [-1, 1] as a 16 kHz mono PCM16 WAV.");

  m.def(
      "read_features",
      [](const std::string& path) { return features_dict(cwv::read_features(std::filesystem::path(path))); },
      "path"_a, "Read a feature file.");

  m.def(
      "write_features",
      [](const std::string& path, const Array& contf0, const Array& mvf, const Array& melcep, double alpha) {
        cwv::write_features(std::filesystem::path(path), features_from(contf0, mvf, melcep, alpha));
      },
      "path"_a, "contf0"_a, "mvf"_a, "melcep"_a, "alpha"_a = 0.42, "Write a feature file.");
}
