#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "ecgc/errors.hpp"
#include "ecgc/signal_io.hpp"
#include "helpers.hpp"

using namespace ecgc;

namespace {

std::filesystem::path temp_path(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_SUITE("signal_io") {

TEST_CASE("csv with a t header and two rows loads one channel of length 2") {
    const auto path = temp_path("ecgc_io_basic.csv");
    {
        std::ofstream out(path);
        out << "t,lead1\n0,0.5\n0.0027777777777777779,0.75\n";
    }
    const EcgRecord record = load_record(path, RecordFormat::csv);
    CHECK(record.channels.size() == 1);
    CHECK(record.channels[0].name == "lead1");
    CHECK(record.length() == 2);
    CHECK(record.channels[0].samples[0] == 0.5);
    CHECK(record.channels[0].samples[1] == 0.75);
    CHECK(record.sample_period_s == doctest::Approx(1.0 / 360.0).epsilon(1e-12));
    std::filesystem::remove(path);
}

TEST_CASE("ragged csv rows fail with the offending line in the message") {
    const auto path = temp_path("ecgc_io_ragged.csv");
    {
        std::ofstream out(path);
        out << "t,lead1\n0,0.5\n0.1,0.6,0.7\n";
    }
    CHECK_THROWS_WITH_AS(load_record(path, RecordFormat::csv),
                         doctest::Contains(":3"), ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("non-numeric csv cell fails naming line and column") {
    const auto path = temp_path("ecgc_io_nonnum.csv");
    {
        std::ofstream out(path);
        out << "lead1,lead2\n0.5,0.6\n0.7,oops\n";
    }
    CHECK_THROWS_WITH_AS(load_record(path, RecordFormat::csv),
                         doctest::Contains("column 2"), ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("csv without a t column treats every column as a channel") {
    const auto path = temp_path("ecgc_io_nochan.csv");
    {
        std::ofstream out(path);
        out << "x,lead1\n0.5,0.6\n0.7,0.8\n";
    }
    const EcgRecord record = load_record(path, RecordFormat::csv, 0.01);
    CHECK(record.channels.size() == 2);
    CHECK(record.channels[0].name == "x");
    CHECK(record.sample_period_s == 0.01);
    std::filesystem::remove(path);
}

TEST_CASE("raw-binary round trip is exact field by field") {
    std::mt19937_64 rng(11);
    EcgRecord record;
    record.sample_period_s = 1.0 / 360.0;
    record.channels.push_back({"ch1", ecgc::testing::random_signal(rng, 257)});
    record.channels.push_back({"ch2", ecgc::testing::random_signal(rng, 257)});

    const auto path = temp_path("ecgc_io_rt.ecg1");
    save_record(record, path, RecordFormat::raw_binary);
    const EcgRecord loaded = load_record(path, RecordFormat::raw_binary);

    CHECK(loaded.sample_period_s == record.sample_period_s);
    REQUIRE(loaded.channels.size() == record.channels.size());
    for (std::size_t c = 0; c < record.channels.size(); ++c) {
        REQUIRE(loaded.channels[c].samples.size() == record.channels[c].samples.size());
        for (std::size_t i = 0; i < record.channels[c].samples.size(); ++i) {
            CHECK(loaded.channels[c].samples[i] == record.channels[c].samples[i]);
        }
    }

    // serializing the reload reproduces the file byte for byte
    const auto path2 = temp_path("ecgc_io_rt2.ecg1");
    save_record(loaded, path2, RecordFormat::raw_binary);
    std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
    const std::string bytes_a((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string bytes_b((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(bytes_a == bytes_b);
    std::filesystem::remove(path);
    std::filesystem::remove(path2);
}

TEST_CASE("csv round trip preserves amplitudes exactly") {
    std::mt19937_64 rng(13);
    EcgRecord record;
    record.sample_period_s = 0.005;
    record.channels.push_back({"lead1", ecgc::testing::random_signal(rng, 64)});

    const auto path = temp_path("ecgc_io_csv_rt.csv");
    save_record(record, path, RecordFormat::csv);
    const EcgRecord loaded = load_record(path, RecordFormat::csv);
    REQUIRE(loaded.length() == record.length());
    for (std::size_t i = 0; i < record.length(); ++i) {
        CHECK(loaded.channels[0].samples[i] == record.channels[0].samples[i]);
    }
    std::filesystem::remove(path);
}

TEST_CASE("noiseless synthesis peaks at the R summit") {
    SyntheticEcgSpec spec;
    spec.beats = 1;
    spec.noise_std_mv = 0.0;
    const EcgRecord record = synthesize_ecg(spec, 0);
    double peak = 0.0;
    for (double v : record.channels[0].samples) peak = std::max(peak, v);
    CHECK(peak == doctest::Approx(spec.r_mv).epsilon(1e-9));
    REQUIRE(record.annotations.has_value());
    CHECK(record.annotations->r.size() == 1);
    // the annotated R index carries the peak value
    CHECK(record.channels[0].samples[record.annotations->r[0]] == doctest::Approx(spec.r_mv));
}

TEST_CASE("synthesis is pure in (spec, seed)") {
    SyntheticEcgSpec spec;
    spec.beats = 3;
    spec.noise_std_mv = 0.05;
    const auto a = synthesize_ecg(spec, 77);
    const auto b = synthesize_ecg(spec, 77);
    REQUIRE(a.length() == b.length());
    for (std::size_t i = 0; i < a.length(); ++i) {
        CHECK(a.channels[0].samples[i] == b.channels[0].samples[i]);
    }
    const auto c = synthesize_ecg(spec, 78);
    bool any_different = false;
    for (std::size_t i = 0; i < a.length(); ++i) {
        if (a.channels[0].samples[i] != c.channels[0].samples[i]) any_different = true;
    }
    CHECK(any_different);
}

TEST_CASE("noise variance matches the requested noise_std") {
    SyntheticEcgSpec spec;
    spec.beats = 100;
    spec.noise_std_mv = 0.01;
    const auto noisy = synthesize_ecg(spec, 5);
    spec.noise_std_mv = 0.0;
    const auto clean = synthesize_ecg(spec, 5);
    REQUIRE(noisy.length() == clean.length());
    // direct variance computation of the residual
    double sum = 0.0, sum_sq = 0.0;
    const std::size_t n = noisy.length();
    for (std::size_t i = 0; i < n; ++i) {
        const double d = noisy.channels[0].samples[i] - clean.channels[0].samples[i];
        sum += d;
        sum_sq += d * d;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(var == doctest::Approx(1e-4).epsilon(0.2));
}

TEST_CASE("synthesis rejects invalid specs") {
    SyntheticEcgSpec spec;
    spec.sample_period_s = spec.q_dur_s; // far above half the smallest duration
    CHECK_THROWS_AS(synthesize_ecg(spec, 0), ValidationError);
    SyntheticEcgSpec spec2;
    spec2.p_dur_s = 1.0; // durations no longer fit the beat
    CHECK_THROWS_AS(synthesize_ecg(spec2, 0), ValidationError);
}

TEST_CASE("downsample_hold identity and forced example") {
    EcgRecord record;
    record.sample_period_s = 1.0;
    record.channels.push_back({"ch1", {1.0, 2.0, 3.0, 4.0}});

    const auto same = downsample_hold(record, 1);
    CHECK(same.channels[0].samples == std::vector<double>{1.0, 2.0, 3.0, 4.0});

    const auto held = downsample_hold(record, 2);
    CHECK(held.channels[0].samples == std::vector<double>{1.0, 1.0, 3.0, 3.0});

    CHECK_THROWS_AS(downsample_hold(record, 0), ValidationError);
}

TEST_CASE("downsample_hold is constant on aligned blocks and keeps kept samples") {
    std::mt19937_64 rng(99);
    const auto signal = ecgc::testing::random_signal(rng, 1000);
    for (int k : {1, 2, 3, 7, 32, 999}) {
        const auto held = downsample_hold(std::span<const double>(signal), k);
        REQUIRE(held.size() == signal.size());
        for (std::size_t i = 0; i < signal.size(); ++i) {
            const std::size_t block_start = i - i % static_cast<std::size_t>(k);
            CHECK(held[i] == signal[block_start]);
        }
    }
}

} // TEST_SUITE
