#include <doctest.h>

#include <cmath>
#include <random>

#include "ecgc/diff_codec.hpp"
#include "ecgc/errors.hpp"
#include "ecgc/predictors.hpp"
#include "ecgc/signal_io.hpp"
#include "helpers.hpp"

using namespace ecgc;
using ecgc::testing::random_codebook;
using ecgc::testing::random_signal;

namespace {

// Straight-line transcription of the encoder rules, kept deliberately
// independent of the library implementation: adjacent difference, additive
// correction from the previous index's codebook gap, nearest-level
// quantization with low ties, cumulative reconstruction.
std::vector<std::uint32_t> reference_diff_indices(const std::vector<double>& x,
                                                  const Codebook& cb) {
    std::vector<std::uint32_t> indices;
    const auto& lv = cb.levels;
    double prev_x = x[0];
    double prev_rec = x[0];
    long prev_l = -1;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double s = prev_x - prev_rec;
        double a = 0.0;
        if (prev_l >= 0 && s > 0.0 && prev_l > 0) a = lv[prev_l] - lv[prev_l - 1];
        if (prev_l >= 0 && s < 0.0 && prev_l + 1 < static_cast<long>(lv.size())) {
            a = -(lv[prev_l + 1] - lv[prev_l]);
        }
        const double dxp = (x[i] - prev_x) + a;
        std::uint32_t best = 0;
        double best_dist = std::abs(dxp - lv[0]);
        for (std::uint32_t l = 1; l < lv.size(); ++l) {
            const double dist = std::abs(dxp - lv[l]);
            if (dist < best_dist) {
                best = l;
                best_dist = dist;
            }
        }
        indices.push_back(best);
        prev_rec = prev_rec + lv[best];
        prev_x = x[i];
        prev_l = best;
    }
    return indices;
}

const Codebook kFiveLevel{{-0.3, -0.1, 0.0, 0.1, 0.3}, {-0.2, -0.05, 0.05, 0.2}};

} // namespace

TEST_SUITE("diff_codec") {

TEST_CASE("constant signal maps every step to the zero level") {
    const std::vector<double> signal(50, 1.25);
    const DiffEncoded enc = diff_encode(signal, kFiveLevel);
    const std::uint32_t zero_level = 2;
    for (auto idx : enc.indices) CHECK(idx == zero_level);
    const auto decoded = diff_decode(enc);
    for (double v : decoded) CHECK(v == 1.25);
}

TEST_CASE("forced arithmetic on the five-level codebook") {
    DiffTrace trace;
    const std::vector<double> signal = {0.0, 0.35, 0.35};
    const DiffEncoded enc = diff_encode(signal, kFiveLevel, ModificationPolicy::table_gap, &trace);

    // first step: no previous error, no correction, nearest level is 0.3
    CHECK(trace.a_factors[1] == 0.0);
    CHECK(enc.indices[0] == 4);
    CHECK(trace.reconstruction[1] == 0.3);

    // second step: s = 0.05 > 0 pulls the difference upward by the gap below
    // the previous level
    CHECK(trace.s_values[2] == doctest::Approx(0.05));
    CHECK(trace.a_factors[2] == doctest::Approx(0.2));
    CHECK(trace.modified_diffs[2] > 0.0);
    const double max_half_cell = 0.1;
    const double err = std::abs(signal[2] - trace.reconstruction[2]);
    CHECK(err < std::abs(trace.s_values[2]) + max_half_cell);
}

TEST_CASE("encoder matches the straight-line reference on random inputs") {
    std::mt19937_64 rng(81);
    for (int trial = 0; trial < 200; ++trial) {
        const auto signal = ecgc::testing::random_walk(rng, 300, 0.5);
        Codebook cb = trial % 2 == 0 ? kFiveLevel : random_codebook(rng);
        const DiffEncoded enc = diff_encode(signal, cb);
        const auto reference = reference_diff_indices(signal, cb);
        REQUIRE(enc.indices.size() == reference.size());
        for (std::size_t i = 0; i < reference.size(); ++i) CHECK(enc.indices[i] == reference[i]);
    }
}

TEST_CASE("decoder reproduces the encoder reconstruction exactly") {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto signal = random_signal(rng, 100, -2.0, 2.0);
        const auto cb = random_codebook(rng);
        DiffTrace trace;
        const DiffEncoded enc = diff_encode(signal, cb, ModificationPolicy::table_gap, &trace);
        const auto decoded = diff_decode(enc);
        REQUIRE(decoded.size() == trace.reconstruction.size());
        for (std::size_t i = 0; i < decoded.size(); ++i) CHECK(decoded[i] == trace.reconstruction[i]);
    }
}

TEST_CASE("invalid stream index raises a corrupt-stream error") {
    DiffEncoded enc;
    enc.initial = 0.0;
    enc.codebook = kFiveLevel;
    enc.indices = {0, 7};
    CHECK_THROWS_AS(diff_decode(enc), CorruptStreamError);
}

TEST_CASE("non-finite input is rejected with its index") {
    std::vector<double> signal = {0.0, 0.5, std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_WITH_AS(diff_encode(signal, kFiveLevel), doctest::Contains("index 2"),
                         NumericError);
}

TEST_CASE("full correction makes the codec identical to the unit closed loop") {
    // with A = s_i the quantizer argument becomes x_i - x-hat_{i-1}, exactly
    // the delta-modulation residual, so streams and reconstructions agree
    std::mt19937_64 rng(89);
    for (int trial = 0; trial < 100; ++trial) {
        const auto signal = random_signal(rng, 200, -3.0, 3.0);
        const auto cb = random_codebook(rng);
        const DiffEncoded diff = diff_encode(signal, cb, ModificationPolicy::full);
        const PredictiveEncoded dpcm = encode_closed_loop(signal, FirPredictor{{1.0}}, cb);
        REQUIRE(diff.indices.size() == dpcm.indices.size());
        for (std::size_t i = 0; i < diff.indices.size(); ++i) {
            CHECK(diff.indices[i] == dpcm.indices[i]);
        }
    }
}

TEST_CASE("with a dense-enough codebook plain differences and the unit closed loop agree") {
    // quarter-step staircase against quarter-step levels: zero quantization
    // error, so both codecs are exact
    std::vector<double> signal = {0.0};
    std::mt19937_64 rng(97);
    std::uniform_int_distribution<int> step(-2, 2);
    for (int i = 0; i < 200; ++i) signal.push_back(signal.back() + 0.25 * step(rng));
    const Codebook cb{{-0.5, -0.25, 0.0, 0.25, 0.5}, {-0.375, -0.125, 0.125, 0.375}};
    const auto diff_rec = diff_decode(diff_encode(signal, cb, ModificationPolicy::none));
    const auto dpcm_rec =
        decode_closed_loop(encode_closed_loop(signal, FirPredictor{{1.0}}, cb), FirPredictor{{1.0}});
    for (std::size_t i = 0; i < signal.size(); ++i) {
        CHECK(diff_rec[i] == signal[i]);
        CHECK(dpcm_rec[i] == signal[i]);
    }
}

TEST_CASE("reconstruction error follows s - A + quantization error at machine precision") {
    std::mt19937_64 rng(101);
    const auto signal = ecgc::testing::random_walk(rng, 2000, 0.4);
    const Codebook cb = uniform_codebook(-0.5, 0.5, 8);
    DiffTrace trace;
    const DiffEncoded enc = diff_encode(signal, cb, ModificationPolicy::table_gap, &trace);
    for (std::size_t i = 1; i < signal.size(); ++i) {
        const double e_star = signal[i] - trace.reconstruction[i];
        const double e_q = trace.modified_diffs[i] - cb.levels[enc.indices[i - 1]];
        const double expected = trace.s_values[i] - trace.a_factors[i] + e_q;
        CHECK(std::abs(e_star - expected) < 1e-12);
    }
}

TEST_CASE("error stays within the codebook span over long runs") {
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 10; ++trial) {
        const Codebook cb = uniform_codebook(-0.6, 0.6, 8);
        // adjacent differences confined to the represented range
        const auto signal = ecgc::testing::random_walk(rng, 100000, cb.levels.back());
        DiffTrace trace;
        diff_encode(signal, cb, ModificationPolicy::table_gap, &trace);
        double worst = 0.0;
        for (std::size_t i = 0; i < signal.size(); ++i) {
            worst = std::max(worst, std::abs(signal[i] - trace.reconstruction[i]));
        }
        CHECK(worst <= cb.span());
    }
}

TEST_CASE("reconstruction keeps the summit shape of a clean beat") {
    SyntheticEcgSpec spec;
    spec.beats = 20;
    spec.noise_std_mv = 0.0;
    const EcgRecord record = synthesize_ecg(spec, 9);
    const auto& x = record.channels[0].samples;
    const Codebook cb = train_differential_codebook(x, 256); // 8-bit codebook
    const auto rec = diff_decode(diff_encode(x, cb));

    const auto& ann = *record.annotations;
    for (std::size_t beat = 0; beat < ann.r.size(); ++beat) {
        // wave summit ordering survives: R is the maximum, Q and S stay below
        // P and T in the reconstruction
        CHECK(rec[ann.r[beat]] > rec[ann.p[beat]]);
        CHECK(rec[ann.r[beat]] > rec[ann.t[beat]]);
        CHECK(rec[ann.q[beat]] < rec[ann.p[beat]]);
        CHECK(rec[ann.s[beat]] < rec[ann.t[beat]]);

        // no oscillation artifact on the R -> S flank: at most one material
        // slope sign change between the summits. Moves within one codebook
        // gap are quantization granularity (idle-channel jitter), not ringing.
        double max_gap = 0.0;
        for (std::size_t l = 1; l < cb.levels.size(); ++l) {
            max_gap = std::max(max_gap, cb.levels[l] - cb.levels[l - 1]);
        }
        const double material = max_gap;
        int sign_changes = 0;
        int last_sign = 0;
        for (std::size_t i = ann.r[beat] + 1; i <= ann.s[beat]; ++i) {
            const double d = rec[i] - rec[i - 1];
            if (std::abs(d) <= material) continue;
            const int sign = d > 0.0 ? 1 : -1;
            if (last_sign != 0 && sign != last_sign) ++sign_changes;
            last_sign = sign;
        }
        CHECK(sign_changes <= 1);
    }
}

TEST_CASE("beta trace is undefined on constant signals and definitional otherwise") {
    const std::vector<double> constant(64, 0.5);
    for (const auto& beta : empirical_beta_trace(constant, kFiveLevel)) {
        CHECK_FALSE(beta.defined);
    }

    std::mt19937_64 rng(107);
    const auto signal = ecgc::testing::random_walk(rng, 500, 0.25);
    const Codebook cb = uniform_codebook(-0.3, 0.3, 8);
    DiffTrace trace;
    diff_encode(signal, cb, ModificationPolicy::table_gap, &trace);
    const auto betas = empirical_beta_trace(signal, cb);
    REQUIRE(betas.size() == trace.a_factors.size());
    for (std::size_t i = 1; i < betas.size(); ++i) {
        if (betas[i].defined) {
            CHECK(betas[i].beta * trace.s_values[i] == doctest::Approx(trace.a_factors[i]));
        }
    }
}

TEST_CASE("the correction reduces the reconstruction error at least half the time") {
    // parallel A = 0 encoding of the same signal is the oracle
    std::mt19937_64 rng(109);
    const auto signal = ecgc::testing::random_walk(rng, 50000, 0.3);
    const Codebook cb = uniform_codebook(-0.35, 0.35, 8);
    DiffTrace with_a, without_a;
    diff_encode(signal, cb, ModificationPolicy::table_gap, &with_a);
    diff_encode(signal, cb, ModificationPolicy::none, &without_a);
    std::size_t reduced = 0, differing = 0;
    for (std::size_t i = 1; i < signal.size(); ++i) {
        const double ea = std::abs(signal[i] - with_a.reconstruction[i]);
        const double e0 = std::abs(signal[i] - without_a.reconstruction[i]);
        if (ea != e0) {
            ++differing;
            if (ea < e0) ++reduced;
        }
    }
    REQUIRE(differing > signal.size() / 2);
    CHECK(static_cast<double>(reduced) >= 0.5 * static_cast<double>(differing));
}

} // TEST_SUITE
