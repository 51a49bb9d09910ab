#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "isosparse/cli.hpp"
#include "isosparse/io.hpp"

using namespace isosparse;

namespace {

std::string temp_path(const std::string &name) {
    return (std::filesystem::temp_directory_path() / ("isosparse_test_" + name)).string();
}

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<double> awkward_values() {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    std::vector<double> x{0.0, -0.0, 1e-310, -5e-324, 1.0 / 3, 1e300, -2.5e-7,
                          std::numeric_limits<double>::max(), std::numeric_limits<double>::min()};
    for (int i = 0; i < 200; ++i)
        x.push_back(g(rng) * std::pow(10.0, i % 40 - 20));
    return x;
}

} // namespace

TEST_CASE("csv signal round trip is bit exact") {
    const auto x = awkward_values();
    const auto back = parse_csv_signal(format_csv_signal(x));
    REQUIRE(back.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::signbit(back[i]) == std::signbit(x[i]));
    CHECK(back == x);

    CHECK(parse_csv_signal("# header\n1, 2,3\n+4\n\n# tail") == std::vector<double>{1, 2, 3, 4});
    CHECK(parse_csv_signal("").empty());
}

TEST_CASE("csv parse errors carry the byte offset") {
    try {
        parse_csv_signal("1,2\n3,x7,4");
        FAIL("expected a parse error");
    } catch (const ParseError &e) {
        CHECK(e.offset() == 6);
    }
    CHECK_THROWS_AS(parse_csv_signal("1.5.2"), ParseError);
    CHECK_THROWS_AS(parse_csv_signal("1;2"), ParseError);
}

TEST_CASE("f64 raw round trip and truncation") {
    const auto x = awkward_values();
    const auto bytes = encode_f64(x);
    CHECK(bytes.size() == 8 * x.size());
    CHECK(decode_f64(bytes) == x);
    try {
        decode_f64(std::span(bytes).first(8 * 3 + 5));
        FAIL("expected a parse error");
    } catch (const ParseError &e) {
        CHECK(e.offset() == 24);
    }
}

TEST_CASE("wav round trip within one quantization step") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1, 1 - 1.0 / 32768);
    WavAudio audio;
    audio.sample_rate = 16000;
    for (int i = 0; i < 1000; ++i)
        audio.samples.push_back(u(rng));
    const auto bytes = encode_wav(audio);
    CHECK(bytes.size() == 44 + 2 * audio.samples.size());
    const auto back = decode_wav(bytes);
    CHECK(back.sample_rate == 16000);
    REQUIRE(back.samples.size() == audio.samples.size());
    for (std::size_t i = 0; i < back.samples.size(); ++i)
        CHECK(std::abs(back.samples[i] - audio.samples[i]) <= 1.0 / 32768);

    // Out-of-range samples clip instead of wrapping.
    const auto clipped = decode_wav(encode_wav({8000, {2.0, -2.0}}));
    CHECK(clipped.samples[0] == doctest::Approx(32767.0 / 32768));
    CHECK(clipped.samples[1] == -1.0);
}

TEST_CASE("wav parse errors") {
    const auto bytes = encode_wav({16000, {0.1, 0.2, 0.3}});
    for (std::size_t cut : {0, 3, 11, 20, 30, 43, 45}) {
        try {
            decode_wav(std::span(bytes).first(cut));
            FAIL("expected a parse error");
        } catch (const ParseError &e) {
            CHECK(e.offset() <= cut);
        }
    }
    auto stereo = bytes;
    stereo[22] = 2;
    CHECK_THROWS_AS(decode_wav(stereo), ParseError);
    auto not_riff = bytes;
    not_riff[0] = 'X';
    CHECK_THROWS_AS(decode_wav(not_riff), ParseError);

    // Unknown chunks before the data are skipped.
    std::vector<std::uint8_t> with_list(bytes.begin(), bytes.begin() + 36);
    const char list[] = {'L', 'I', 'S', 'T', 3, 0, 0, 0, 'a', 'b', 'c', 0};
    with_list.insert(with_list.end(), list, list + sizeof(list));
    with_list.insert(with_list.end(), bytes.begin() + 36, bytes.end());
    CHECK(decode_wav(with_list).samples.size() == 3);
}

TEST_CASE("signal files") {
    const std::vector<double> x{0.25, -0.5, 0.125};
    for (auto [name, format] : {std::pair{"s.csv", SignalFormat::csv}, std::pair{"s.f64", SignalFormat::f64_raw},
                                std::pair{"s.wav", SignalFormat::wav_pcm16}}) {
        const auto path = temp_path(name);
        write_signal(path, x, format, 8000);
        CHECK(format_from_extension(path) == format);
        std::uint32_t rate = 0;
        CHECK(read_signal(path, format, &rate) == x);
        if (format == SignalFormat::wav_pcm16)
            CHECK(rate == 8000);
        std::remove(path.c_str());
    }
    CHECK_THROWS_AS(read_signal(temp_path("missing.csv"), SignalFormat::csv), std::runtime_error);
    CHECK(parse_signal_format("wav-pcm16") == SignalFormat::wav_pcm16);
    CHECK_THROWS_AS(parse_signal_format("mp3"), std::invalid_argument);
}

TEST_CASE("result csv header and cells") {
    ExperimentResult r;
    r.experiment = "demo";
    r.seed = 7;
    r.config = {{"trials", "3"}};
    r.rows.columns = {"method", "value", "count"};
    r.rows.rows = {{std::string("a,b"), 0.1, 3LL}};
    std::ostringstream os;
    write_result_csv(os, r, r.rows);
    CHECK(os.str() == std::string("# tool: isosparse ") + tool_version +
                          "\n# experiment: demo\n# seed: 7\n# config: trials=3\n"
                          "method,value,count\n\"a,b\",0.1,3\n");
}

TEST_CASE("cli prox") {
    auto r = cli({"prox", "--z", "5,2,1", "--lambda", "1", "--gamma", "0.5"});
    CHECK(r.code == exit_ok);
    CHECK(r.out == "4,0,0\nk=1,h=3\n");

    r = cli({"prox", "--z", "0.1,0.2", "--lambda", "1", "--gamma", "0.5"});
    CHECK(r.code == exit_ok);
    CHECK(r.out == "0,0\nk=0,h=1\n");

    r = cli({"prox", "--z", "1,2", "--lambda", "1", "--gamma", "1.0"});
    CHECK(r.code == exit_usage);
    CHECK(r.err.find("must be < 1") != std::string::npos);

    r = cli({"prox", "--z=-5,2,1,0.5", "--lambda", "1", "--gamma", "0.5", "--groups", "3,1"});
    CHECK(r.code == exit_ok);
    CHECK(r.out == "-4,0,0,0\nk=1,h=3\nk=0,h=1\n");

    CHECK(cli({"prox", "--z", "1,2", "--lambda", "1", "--gamma", "0.1", "--groups", "3"}).code == exit_usage);
    CHECK(cli({"prox", "--lambda", "1", "--gamma", "0.1"}).code == exit_usage);
    CHECK(cli({"prox", "--z", "1", "--gamma", "0.1"}).code == exit_usage);
}

TEST_CASE("cli prox reads signal files") {
    const auto path = temp_path("prox_in.f64");
    write_signal(path, std::vector<double>{5, 2, 1}, SignalFormat::f64_raw);
    const auto r = cli({"prox", "--input", path, "--lambda", "1", "--gamma", "0.5"});
    CHECK(r.code == exit_ok);
    CHECK(r.out == "4,0,0\nk=1,h=3\n");
    std::remove(path.c_str());

    const auto bad = temp_path("prox_bad.csv");
    write_file(bad, std::vector<std::uint8_t>{'1', ',', 'q'});
    const auto e = cli({"prox", "--input", bad, "--lambda", "1", "--gamma", "0.5"});
    CHECK(e.code == exit_usage);
    CHECK(e.err.find("at byte 2") != std::string::npos);
    std::remove(bad.c_str());
}

TEST_CASE("cli usage errors") {
    CHECK(cli({}).code == exit_usage);
    CHECK(cli({"bogus"}).code == exit_usage);
    CHECK(cli({"sweep", "--K", "11"}).code == exit_usage);
    CHECK(cli({"selftest", "--sabotage", "other"}).code == exit_usage);
    CHECK(cli({"--help"}).code == exit_ok);
}

TEST_CASE("cli selftest") {
    auto r = cli({"selftest", "--cases", "10"});
    CHECK(r.code == exit_ok);
    CHECK(r.out.find("FAIL") == std::string::npos);

    r = cli({"selftest", "--cases", "50", "--sabotage", "h-offset"});
    CHECK(r.code == exit_failure);
    CHECK(r.out.find("FAIL oracle agreement") != std::string::npos);
}

TEST_CASE("cli sweep output is reproducible") {
    const auto a = temp_path("sweep_a.csv"), b = temp_path("sweep_b.csv");
    auto r = cli({"sweep", "--K", "1,2", "--trials", "20", "--seed", "5", "-o", a});
    REQUIRE(r.code == exit_ok);
    CHECK(r.out.find("K=1 argmax") != std::string::npos);
    REQUIRE(cli({"sweep", "--K", "1,2", "--trials", "20", "--seed", "5", "-o", b}).code == exit_ok);
    CHECK(read_file(a) == read_file(b));

    const auto bytes = read_file(a);
    const std::string text(bytes.begin(), bytes.end());
    CHECK(text.rfind("# tool: isosparse ", 0) == 0);
    CHECK(text.find("# seed: 5\n") != std::string::npos);
    CHECK(text.find("# config: K=1;2\n") != std::string::npos);
    CHECK(text.find("K,trial,lambda_gamma,sigma,gain_db\n") != std::string::npos);

    const auto summary = temp_path("sweep_a.summary.csv");
    const auto sbytes = read_file(summary);
    const std::string stext(sbytes.begin(), sbytes.end());
    CHECK(stext.find("K,lambda_gamma,mean_gain_db,std_gain_db,is_argmax\n") != std::string::npos);
    for (const auto &p : {a, b, summary, temp_path("sweep_b.summary.csv")})
        std::remove(p.c_str());
}
