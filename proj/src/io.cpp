#include "isosparse/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <ostream>

#include <fmt/format.h>

namespace isosparse {

namespace {

static_assert(std::endian::native == std::endian::little, "byte order helpers assume a little-endian host");

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_{bytes} {}

    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

    void need(std::size_t n, const char *what) const {
        if (remaining() < n)
            throw ParseError(fmt::format("truncated input: expected {} byte(s) of {}", n, what), bytes_.size());
    }
    std::uint32_t u32(const char *what) {
        need(4, what);
        std::uint32_t v;
        std::memcpy(&v, bytes_.data() + pos_, 4);
        pos_ += 4;
        return v;
    }
    std::uint16_t u16(const char *what) {
        need(2, what);
        std::uint16_t v;
        std::memcpy(&v, bytes_.data() + pos_, 2);
        pos_ += 2;
        return v;
    }
    std::string tag() {
        need(4, "chunk tag");
        std::string t(reinterpret_cast<const char *>(bytes_.data() + pos_), 4);
        pos_ += 4;
        return t;
    }
    void skip(std::size_t n, const char *what) {
        need(n, what);
        pos_ += n;
    }
    std::span<const std::uint8_t> take(std::size_t n, const char *what) {
        need(n, what);
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

template <class T>
void put(std::vector<std::uint8_t> &out, T v) {
    std::uint8_t b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    out.insert(out.end(), b, b + sizeof(T));
}

void put_tag(std::vector<std::uint8_t> &out, const char *tag) { out.insert(out.end(), tag, tag + 4); }

std::string quote(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + '"';
}

} // namespace

ParseError::ParseError(const std::string &what, std::size_t offset)
    : std::runtime_error(fmt::format("{} (at byte {})", what, offset)), offset_{offset} {}

SignalFormat parse_signal_format(std::string_view name) {
    if (name == "csv")
        return SignalFormat::csv;
    if (name == "wav" || name == "wav-pcm16")
        return SignalFormat::wav_pcm16;
    if (name == "f64" || name == "f64-raw")
        return SignalFormat::f64_raw;
    throw std::invalid_argument(fmt::format("unknown signal format '{}'", name));
}

SignalFormat format_from_extension(const std::string &path) {
    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (ext == "csv")
        return SignalFormat::csv;
    if (ext == "wav")
        return SignalFormat::wav_pcm16;
    if (ext == "f64" || ext == "raw" || ext == "bin")
        return SignalFormat::f64_raw;
    throw std::invalid_argument(fmt::format("cannot infer a signal format from '{}'", path));
}

std::vector<double> parse_csv_signal(std::string_view text) {
    std::vector<double> x;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto separator = [](char c) { return c == ',' || c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    bool line_start = true;
    while (i < n) {
        const char c = text[i];
        if (line_start && c == '#') {
            while (i < n && text[i] != '\n')
                ++i;
            continue;
        }
        if (separator(c)) {
            line_start = c == '\n';
            ++i;
            continue;
        }
        line_start = false;
        std::size_t end = i;
        while (end < n && !separator(text[end]))
            ++end;
        double v = 0;
        const char *first = text.data() + i;
        const char *last = text.data() + end;
        if (*first == '+')
            ++first;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last)
            throw ParseError(fmt::format("invalid number '{}'", text.substr(i, end - i)), i);
        x.push_back(v);
        i = end;
    }
    return x;
}

std::string format_csv_signal(std::span<const double> x) {
    std::string out;
    for (double v : x)
        out += fmt::format("{}\n", v);
    return out;
}

std::vector<std::uint8_t> encode_wav(const WavAudio &audio) {
    const auto n = audio.samples.size();
    if (n > (0xffffffffu - 36) / 2)
        throw std::invalid_argument("encode_wav: too many samples");
    const auto data_bytes = static_cast<std::uint32_t>(2 * n);
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);
    put_tag(out, "RIFF");
    put<std::uint32_t>(out, 36 + data_bytes);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put<std::uint32_t>(out, 16);
    put<std::uint16_t>(out, 1); // PCM
    put<std::uint16_t>(out, 1); // mono
    put<std::uint32_t>(out, audio.sample_rate);
    put<std::uint32_t>(out, audio.sample_rate * 2);
    put<std::uint16_t>(out, 2);
    put<std::uint16_t>(out, 16);
    put_tag(out, "data");
    put<std::uint32_t>(out, data_bytes);
    for (double v : audio.samples) {
        const double q = std::isfinite(v) ? std::round(v * 32768.0) : 0.0;
        put<std::int16_t>(out, static_cast<std::int16_t>(std::clamp(q, -32768.0, 32767.0)));
    }
    return out;
}

WavAudio decode_wav(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    if (r.tag() != "RIFF")
        throw ParseError("missing RIFF tag", 0);
    r.u32("RIFF size");
    if (r.tag() != "WAVE")
        throw ParseError("missing WAVE tag", 8);
    WavAudio audio;
    bool have_format = false;
    while (true) {
        const std::size_t at = r.position();
        const auto id = r.tag();
        const auto size = r.u32("chunk size");
        if (id == "fmt ") {
            if (size < 16)
                throw ParseError("fmt chunk too short", at);
            const std::size_t body = r.position();
            const auto format = r.u16("audio format");
            const auto channels = r.u16("channel count");
            audio.sample_rate = r.u32("sample rate");
            r.u32("byte rate");
            r.u16("block align");
            const auto bits = r.u16("bits per sample");
            if (format != 1)
                throw ParseError(fmt::format("unsupported audio format {} (need PCM)", format), body);
            if (channels != 1)
                throw ParseError(fmt::format("unsupported channel count {} (need mono)", channels), body + 2);
            if (bits != 16)
                throw ParseError(fmt::format("unsupported sample width {} (need 16)", bits), body + 14);
            r.skip(size - 16 + (size & 1), "fmt chunk");
            have_format = true;
        } else if (id == "data") {
            if (!have_format)
                throw ParseError("data chunk before fmt chunk", at);
            if (size % 2 != 0)
                throw ParseError("odd data chunk size for 16-bit samples", at + 4);
            const auto data = r.take(size, "sample data");
            audio.samples.resize(size / 2);
            for (std::size_t i = 0; i < audio.samples.size(); ++i) {
                std::int16_t s;
                std::memcpy(&s, data.data() + 2 * i, 2);
                audio.samples[i] = s / 32768.0;
            }
            return audio;
        } else {
            r.skip(size + (size & 1), "chunk body");
        }
    }
}

std::vector<std::uint8_t> encode_f64(std::span<const double> x) {
    std::vector<std::uint8_t> out(x.size() * 8);
    if (!x.empty())
        std::memcpy(out.data(), x.data(), out.size());
    return out;
}

std::vector<double> decode_f64(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % 8 != 0)
        throw ParseError("raw f64 data length is not a multiple of 8", bytes.size() - bytes.size() % 8);
    std::vector<double> x(bytes.size() / 8);
    if (!x.empty())
        std::memcpy(x.data(), bytes.data(), bytes.size());
    return x;
}

std::vector<std::uint8_t> read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error(fmt::format("cannot open '{}' for reading", path));
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string &path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw std::runtime_error(fmt::format("failed writing '{}'", path));
}

std::vector<double> read_signal(const std::string &path, SignalFormat format, std::uint32_t *sample_rate) {
    const auto bytes = read_file(path);
    switch (format) {
    case SignalFormat::csv:
        return parse_csv_signal({reinterpret_cast<const char *>(bytes.data()), bytes.size()});
    case SignalFormat::wav_pcm16: {
        auto audio = decode_wav(bytes);
        if (sample_rate)
            *sample_rate = audio.sample_rate;
        return std::move(audio.samples);
    }
    case SignalFormat::f64_raw:
        return decode_f64(bytes);
    }
    throw std::logic_error("read_signal: bad format");
}

void write_signal(const std::string &path, std::span<const double> x, SignalFormat format,
                  std::uint32_t sample_rate) {
    switch (format) {
    case SignalFormat::csv: {
        const auto text = format_csv_signal(x);
        write_file(path, {reinterpret_cast<const std::uint8_t *>(text.data()), text.size()});
        return;
    }
    case SignalFormat::wav_pcm16:
        write_file(path, encode_wav({sample_rate, {x.begin(), x.end()}}));
        return;
    case SignalFormat::f64_raw:
        write_file(path, encode_f64(x));
        return;
    }
}

std::string format_cell(const Cell &cell) {
    if (const auto *s = std::get_if<std::string>(&cell))
        return quote(*s);
    if (const auto *i = std::get_if<long long>(&cell))
        return fmt::format("{}", *i);
    return fmt::format("{}", std::get<double>(cell));
}

void write_result_csv(std::ostream &os, const ExperimentResult &record, const Table &table) {
    os << "# tool: isosparse " << tool_version << '\n';
    os << "# experiment: " << record.experiment << '\n';
    os << "# seed: " << record.seed << '\n';
    for (const auto &[key, value] : record.config)
        os << "# config: " << key << '=' << value << '\n';
    for (std::size_t j = 0; j < table.columns.size(); ++j)
        os << (j ? "," : "") << quote(table.columns[j]);
    os << '\n';
    for (const auto &row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j)
            os << (j ? "," : "") << format_cell(row[j]);
        os << '\n';
    }
}

} // namespace isosparse
