#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "isosparse/experiments.hpp"

namespace isosparse {

inline constexpr const char *tool_version = "0.1.0";

/// Malformed input; `offset` is the byte position where parsing failed.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string &what, std::size_t offset);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

enum class SignalFormat { csv, wav_pcm16, f64_raw };

/// "csv", "wav" / "wav-pcm16" or "f64" / "f64-raw". Throws std::invalid_argument otherwise.
SignalFormat parse_signal_format(std::string_view name);

/// Guesses the format from a file extension (.csv, .wav, .f64 / .raw / .bin).
SignalFormat format_from_extension(const std::string &path);

// Numbers separated by commas, whitespace or newlines; lines starting with '#'
// are comments. Values are written in shortest round-trip form.
std::vector<double> parse_csv_signal(std::string_view text);
std::string format_csv_signal(std::span<const double> x);

struct WavAudio {
    std::uint32_t sample_rate = 16000;
    std::vector<double> samples;
};

/// Mono 16-bit PCM. Samples map to round(32768 x) clamped to [-32768, 32767],
/// so in-range values come back within 2^-16.
std::vector<std::uint8_t> encode_wav(const WavAudio &audio);
WavAudio decode_wav(std::span<const std::uint8_t> bytes);

/// Little-endian IEEE-754 doubles, no header.
std::vector<std::uint8_t> encode_f64(std::span<const double> x);
std::vector<double> decode_f64(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::string &path);
void write_file(const std::string &path, std::span<const std::uint8_t> bytes);

/// Reads a signal; for WAV files the sample rate goes to `sample_rate` if given.
std::vector<double> read_signal(const std::string &path, SignalFormat format, std::uint32_t *sample_rate = nullptr);
void write_signal(const std::string &path, std::span<const double> x, SignalFormat format,
                  std::uint32_t sample_rate = 16000);

/// Comment header (tool version, experiment, seed, config echo) followed by
/// the table with a column-name row. No timestamps, so reruns are byte-identical.
void write_result_csv(std::ostream &os, const ExperimentResult &record, const Table &table);
std::string format_cell(const Cell &cell);

} // namespace isosparse
