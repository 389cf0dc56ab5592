#include "cwvocoder/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "cwvocoder/error.hpp"

namespace cwv {

namespace {

template <typename U>
void put_le(std::ostream& os, U v) {
  std::array<char, sizeof(U)> b{};
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b.data(), b.size());
}

void put_u32(std::ostream& os, std::uint32_t v) { put_le(os, v); }
void put_u16(std::ostream& os, std::uint16_t v) { put_le(os, v); }
void put_f32(std::ostream& os, double v) { put_u32(os, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

class Reader {
 public:
  Reader(std::istream& is, const char* what) : is_(is), what_(what) {}

  void bytes(char* dst, std::size_t n) {
    is_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n)
      throw FormatError(std::string(what_) + ": unexpected end of data");
  }
  std::uint32_t u32() {
    std::array<unsigned char, 4> b{};
    bytes(reinterpret_cast<char*>(b.data()), 4);
    return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }
  std::uint16_t u16() {
    std::array<unsigned char, 2> b{};
    bytes(reinterpret_cast<char*>(b.data()), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  double f32() { return std::bit_cast<float>(u32()); }
  void magic(const char* expected) {
    std::array<char, 4> m{};
    bytes(m.data(), 4);
    if (std::memcmp(m.data(), expected, 4) != 0)
      throw FormatError(std::string(what_) + ": bad magic, expected \"" + expected + "\"");
  }
  void skip(std::size_t n) {
    std::array<char, 256> buf{};
    while (n > 0) {
      const std::size_t k = std::min(n, buf.size());
      bytes(buf.data(), k);
      n -= k;
    }
  }
  bool at_end() { return is_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& is_;
  const char* what_;
};

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for reading");
  return f;
}

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  fn(f);
  f.flush();
  if (!f) throw IoError("failed writing " + path.string());
}

std::uint32_t micros(double seconds) {
  return static_cast<std::uint32_t>(std::llround(seconds * 1e6));
}

}  // namespace

// -- WAV ---------------------------------------------------------------------------

Waveform read_wav(std::istream& is) {
  Reader r(is, "WAV");
  r.magic("RIFF");
  r.u32();
  r.magic("WAVE");
  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0, format = 0;
  std::uint32_t rate = 0;
  for (;;) {
    std::array<char, 4> id{};
    r.bytes(id.data(), 4);
    const std::uint32_t size = r.u32();
    const std::string tag(id.data(), 4);
    if (tag == "fmt ") {
      if (size < 16) throw FormatError("WAV: fmt chunk too short");
      format = r.u16();
      channels = r.u16();
      rate = r.u32();
      r.u32();
      r.u16();
      bits = r.u16();
      r.skip(size - 16 + (size & 1));
      have_fmt = true;
    } else if (tag == "data") {
      if (!have_fmt) throw FormatError("WAV: data chunk before fmt chunk");
      if (format != 1 || bits != 16)
        throw FormatError("WAV: expected 16-bit PCM, got format " + std::to_string(format) +
                          " with " + std::to_string(bits) + " bits");
      if (channels != 1)
        throw FormatError("WAV: expected mono, got " + std::to_string(channels) + " channels");
      if (rate != static_cast<std::uint32_t>(kCanonicalSampleRate))
        throw FormatError("WAV: expected a sample rate of 16000 Hz, got " + std::to_string(rate) +
                          " Hz");
      Waveform w;
      w.sample_rate = rate;
      w.samples.resize(size / 2);
      for (double& s : w.samples) s = static_cast<std::int16_t>(r.u16()) / 32768.0;
      return w;
    } else {
      r.skip(size + (size & 1));
    }
  }
}

Waveform read_wav(const std::filesystem::path& path) {
  auto f = open_in(path);
  return read_wav(f);
}

void write_wav(std::ostream& os, const Waveform& wave) {
  const auto n = static_cast<std::uint32_t>(wave.samples.size());
  const auto rate = static_cast<std::uint32_t>(std::lround(wave.sample_rate));
  os.write("RIFF", 4);
  put_u32(os, 36 + 2 * n);
  os.write("WAVEfmt ", 8);
  put_u32(os, 16);
  put_u16(os, 1);
  put_u16(os, 1);
  put_u32(os, rate);
  put_u32(os, rate * 2);
  put_u16(os, 2);
  put_u16(os, 16);
  os.write("data", 4);
  put_u32(os, 2 * n);
  for (double s : wave.samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    const auto q = static_cast<std::int16_t>(std::clamp(std::lround(c * 32768.0), -32768L, 32767L));
    put_u16(os, static_cast<std::uint16_t>(q));
  }
}

void write_wav(const std::filesystem::path& path, const Waveform& wave) {
  write_file(path, [&](std::ostream& os) { write_wav(os, wave); });
}

// -- CWVF --------------------------------------------------------------------------

void write_features(std::ostream& os, const UtteranceFeatures& features) {
  validate(features);
  const auto& grid = features.grid();
  const std::size_t order = features.melcep.order;
  os.write("CWVF", 4);
  put_u32(os, kFeatureFileVersion);
  put_u32(os, static_cast<std::uint32_t>(std::lround(features.source_sample_rate)));
  put_u32(os, micros(grid.frame_shift));
  put_u32(os, micros(grid.window_length));
  put_u32(os, static_cast<std::uint32_t>(order));
  put_f32(os, features.melcep.alpha);
  put_u32(os, static_cast<std::uint32_t>(features.num_frames()));
  for (std::size_t t = 0; t < features.num_frames(); ++t) {
    put_f32(os, features.contf0.values[t]);
    put_f32(os, features.mvf.values[t]);
    for (double c : features.melcep.frame(t)) put_f32(os, c);
  }
}

void write_features(const std::filesystem::path& path, const UtteranceFeatures& features) {
  write_file(path, [&](std::ostream& os) { write_features(os, features); });
}

UtteranceFeatures read_features(std::istream& is) {
  Reader r(is, "CWVF");
  r.magic("CWVF");
  const auto version = r.u32();
  if (version != kFeatureFileVersion)
    throw FormatError("CWVF: unsupported version " + std::to_string(version));
  const auto rate = r.u32();
  const auto shift_us = r.u32();
  const auto window_us = r.u32();
  const auto order = r.u32();
  const double alpha = r.f32();
  const auto frames = r.u32();
  if (rate == 0 || shift_us == 0 || window_us == 0 || order == 0 || order > 1000 ||
      !(std::abs(alpha) < 1.0))
    throw FormatError("CWVF: header fields out of range");

  UtteranceFeatures f;
  f.source_sample_rate = rate;
  FrameGrid grid;
  grid.frame_shift = shift_us / 1e6;
  grid.window_length = window_us / 1e6;
  grid.num_frames = frames;
  grid.sample_rate = rate;
  f.contf0 = {{}, TrackKind::ContF0, grid};
  f.mvf = {{}, TrackKind::Mvf, grid};
  f.melcep.order = order;
  f.melcep.alpha = alpha;
  f.melcep.grid = grid;
  // Grow incrementally so a forged frame count cannot force a huge allocation.
  for (std::uint32_t t = 0; t < frames; ++t) {
    f.contf0.values.push_back(r.f32());
    f.mvf.values.push_back(r.f32());
    for (std::uint32_t m = 0; m <= order; ++m) f.melcep.coefficients.push_back(r.f32());
  }
  if (!r.at_end()) throw FormatError("CWVF: trailing bytes after payload");
  try {
    validate(f);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("CWVF: ") + e.what());
  }
  return f;
}

UtteranceFeatures read_features(const std::filesystem::path& path) {
  auto f = open_in(path);
  return read_features(f);
}

// -- CWRP --------------------------------------------------------------------------

void write_prototype(std::ostream& os, const ResidualPrototype& p) {
  const std::size_t l = p.frame_length;
  if (p.mean_frame.size() != l)
    throw InvalidArgument("prototype: mean frame length does not match frame_length");
  for (const auto& c : p.components)
    if (c.size() != l) throw InvalidArgument("prototype: component length mismatch");
  os.write("CWRP", 4);
  put_u32(os, kPrototypeFileVersion);
  put_u32(os, static_cast<std::uint32_t>(p.components.size()));
  put_u32(os, static_cast<std::uint32_t>(l));
  for (double v : p.mean_frame) put_f32(os, v);
  for (const auto& c : p.components)
    for (double v : c) put_f32(os, v);
}

void write_prototype(const std::filesystem::path& path, const ResidualPrototype& p) {
  write_file(path, [&](std::ostream& os) { write_prototype(os, p); });
}

ResidualPrototype read_prototype(std::istream& is) {
  Reader r(is, "CWRP");
  r.magic("CWRP");
  const auto version = r.u32();
  if (version != kPrototypeFileVersion)
    throw FormatError("CWRP: unsupported version " + std::to_string(version));
  const auto k = r.u32();
  const auto l = r.u32();
  if (k == 0 || l < 2 || k > l) throw FormatError("CWRP: header fields out of range");
  ResidualPrototype p;
  p.frame_length = l;
  for (std::uint32_t i = 0; i < l; ++i) p.mean_frame.push_back(r.f32());
  for (std::uint32_t c = 0; c < k; ++c) {
    std::vector<double> v;
    for (std::uint32_t i = 0; i < l; ++i) v.push_back(r.f32());
    p.components.push_back(std::move(v));
  }
  if (!r.at_end()) throw FormatError("CWRP: trailing bytes after payload");
  for (const auto& c : p.components)
    for (double v : c)
      if (!std::isfinite(v)) throw FormatError("CWRP: non-finite component value");
  return p;
}

ResidualPrototype read_prototype(const std::filesystem::path& path) {
  auto f = open_in(path);
  return read_prototype(f);
}

}  // namespace cwv
