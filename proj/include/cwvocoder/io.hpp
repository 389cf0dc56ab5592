#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "cwvocoder/features.hpp"
#include "cwvocoder/synthesis.hpp"

namespace cwv {

// All binary formats are little-endian; floats are IEEE-754 binary32.

/// Reads 16-bit PCM mono RIFF/WAVE at 16 kHz. Other encodings, channel counts
/// or rates raise FormatError naming what was expected.
Waveform read_wav(std::istream& is);
Waveform read_wav(const std::filesystem::path& path);

/// Writes 16-bit PCM mono; samples are clipped to [-1, 1].
void write_wav(std::ostream& os, const Waveform& wave);
void write_wav(const std::filesystem::path& path, const Waveform& wave);

inline constexpr std::uint32_t kFeatureFileVersion = 1;

/// CWVF layout: "CWVF", u32 version, u32 sample_rate, u32 frame_shift_us,
/// u32 window_length_us, u32 order, f32 alpha, u32 num_frames, then per
/// frame [contF0, MVF, c(0)..c(order)] as f32.
void write_features(std::ostream& os, const UtteranceFeatures& features);
void write_features(const std::filesystem::path& path, const UtteranceFeatures& features);
UtteranceFeatures read_features(std::istream& is);
UtteranceFeatures read_features(const std::filesystem::path& path);

inline constexpr std::uint32_t kPrototypeFileVersion = 1;

/// CWRP layout: "CWRP", u32 version, u32 K, u32 L, then K + 1 frames of L
/// f32 values, the mean frame first.
void write_prototype(std::ostream& os, const ResidualPrototype& prototype);
void write_prototype(const std::filesystem::path& path, const ResidualPrototype& prototype);
ResidualPrototype read_prototype(std::istream& is);
ResidualPrototype read_prototype(const std::filesystem::path& path);

}  // namespace cwv
