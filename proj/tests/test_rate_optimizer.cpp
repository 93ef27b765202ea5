#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "ecgc/errors.hpp"
#include "ecgc/rate_optimizer.hpp"
#include "ecgc/signal_io.hpp"
#include "helpers.hpp"

using namespace ecgc;

namespace {

EcgRecord annotated_record(double t0, std::size_t q, std::size_t r, std::size_t s) {
    EcgRecord record;
    record.sample_period_s = t0;
    record.channels.push_back({"ch1", std::vector<double>(s + 10, 0.0)});
    Annotations ann;
    ann.q = {q};
    ann.r = {r};
    ann.s = {s};
    record.annotations = ann;
    return record;
}

} // namespace

TEST_SUITE("rate_optimizer") {

TEST_CASE("qrs bound doubles the smallest annotated gap") {
    // R -> S gap of 56.9 ms at a 0.1 ms grid
    const auto record = annotated_record(1e-4, 0, 600, 600 + 569);
    const double bound = qrs_period_bound({record});
    CHECK(std::abs(bound - 0.1138) < 1e-15);

    // Q -> R 40 ms below R -> S 60 ms: the smaller gap wins
    const auto record2 = annotated_record(1e-3, 10, 50, 110);
    CHECK(qrs_period_bound({record2}) == doctest::Approx(0.08).epsilon(1e-12));
}

TEST_CASE("qrs bound equals a brute-force scan over jittered beats") {
    std::mt19937_64 rng(307);
    std::uniform_int_distribution<int> gap(20, 90);
    std::vector<EcgRecord> corpus;
    double brute = std::numeric_limits<double>::infinity();
    for (int rec = 0; rec < 5; ++rec) {
        EcgRecord record;
        record.sample_period_s = 1e-3;
        Annotations ann;
        std::size_t cursor = 5;
        for (int beat = 0; beat < 20; ++beat) {
            const std::size_t q = cursor;
            const std::size_t r = q + static_cast<std::size_t>(gap(rng));
            const std::size_t s = r + static_cast<std::size_t>(gap(rng));
            ann.q.push_back(q);
            ann.r.push_back(r);
            ann.s.push_back(s);
            brute = std::min({brute, (r - q) * record.sample_period_s,
                              (s - r) * record.sample_period_s});
            cursor = s + 100;
        }
        record.channels.push_back({"ch1", std::vector<double>(cursor + 10, 0.0)});
        record.annotations = ann;
        corpus.push_back(std::move(record));
    }
    CHECK(qrs_period_bound(corpus) == doctest::Approx(2.0 * brute).epsilon(1e-12));
}

TEST_CASE("qrs bound validates annotations") {
    EcgRecord record;
    record.sample_period_s = 1e-3;
    record.channels.push_back({"ch1", std::vector<double>(100, 0.0)});
    CHECK_THROWS_AS(qrs_period_bound({record}), ValidationError);
}

TEST_CASE("word length bound scans the power-of-two inequality") {
    CHECK(word_length_bound(std::vector<double>{0.04}, std::vector<double>{1.0}) == 4);
    CHECK(word_length_bound(std::vector<double>{0.5}, std::vector<double>{1.0}) == 0);
    // boundary case: 1/32 satisfies 1/2^(W+1) <= ratio exactly at W = 4
    CHECK(word_length_bound(std::vector<double>{1.0 / 32.0}, std::vector<double>{1.0}) == 4);
    // scaling by the envelope: 0.2 / 5 = 0.04
    CHECK(word_length_bound(std::vector<double>{0.2, 3.0}, std::vector<double>{5.0, 4.0}) == 4);
    CHECK_THROWS_AS(word_length_bound(std::vector<double>{0.1}, std::vector<double>{0.0}),
                    ValidationError);
}

TEST_CASE("average square error basics and oracle") {
    const std::vector<double> a = {1.0, 2.0, 3.0};
    CHECK(ase(a, a) == 0.0);
    const std::vector<double> b = {1.1, 2.1, 3.1};
    CHECK(ase(a, b) == doctest::Approx(0.01).epsilon(1e-12));

    std::mt19937_64 rng(311);
    const auto x = ecgc::testing::random_signal(rng, 777);
    const auto y = ecgc::testing::random_signal(rng, 777);
    double naive = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) naive += (x[i] - y[i]) * (x[i] - y[i]);
    naive /= static_cast<double>(x.size());
    CHECK(ase(x, y) == doctest::Approx(naive).epsilon(1e-12));

    CHECK_THROWS_AS(ase(a, std::vector<double>{1.0}), ValidationError);
}

TEST_CASE("default bounds span 9 word lengths and 40 downsampling factors") {
    const auto signal = ecgc::testing::synth_channel(12, 0.0, 401);
    const auto grid = evaluate_grid(signal, 1.0 / 360.0, GridCodec::uniform_direct, RateBounds{});
    std::set<int> ws, ks;
    for (const auto& p : grid) {
        ws.insert(p.w);
        ks.insert(p.k);
        CHECK(p.rate_bps == static_cast<double>(p.w) / p.t_t_s);
    }
    CHECK(ws.size() == 9);
    CHECK(*ws.begin() == 4);
    CHECK(*ws.rbegin() == 12);
    CHECK(ks.size() == 40);
    CHECK(*ks.begin() == 1);
    CHECK(*ks.rbegin() == 40);
    CHECK(grid.size() == 9 * 40);
}

namespace {

// slow multitone test signal: smooth, spread amplitude distribution without
// atoms, so mean quantization error scales cleanly with cell width and hold
// error grows with the hold span
std::vector<double> multitone(std::size_t n, double t0) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = i * t0;
        out[i] = 0.5 * std::sin(2.0 * M_PI * 0.50 * t) + 0.3 * std::sin(2.0 * M_PI * 0.70 * t + 1.0) +
                 0.2 * std::sin(2.0 * M_PI * 0.31 * t + 2.0);
    }
    return out;
}

} // namespace

TEST_CASE("direct-quantization grid error shrinks with word length at fixed K") {
    const auto signal = multitone(10000, 1.0 / 360.0);
    const auto grid = evaluate_grid(signal, 1.0 / 360.0, GridCodec::uniform_direct, RateBounds{});
    const auto [mn, mx] = std::minmax_element(signal.begin(), signal.end());
    const double range = *mx - *mn;
    std::map<int, std::map<int, double>> by_k;
    for (const auto& p : grid) by_k[p.k][p.w] = p.ase;
    for (const auto& [k, row] : by_k) {
        for (auto it = std::next(row.begin()); it != row.end(); ++it) {
            const double prev = std::prev(it)->second;
            if (k == 1) {
                // no hold error at K = 1: pure quantization error, strictly monotone
                CHECK(it->second <= prev + 1e-12);
            } else {
                // on the hold-error plateau the hold/quantization cross term can
                // wobble either way; Cauchy-Schwarz bounds it by O(sqrt(ase) * cell)
                const double cell = range / std::ldexp(1.0, std::prev(it)->first);
                const double slack = 1.5 * std::sqrt(prev) * cell + cell * cell;
                CHECK(it->second <= prev + slack);
            }
        }
        // before the hold plateau, each halving of the cell width helps materially
        if (k <= 8) {
            CHECK(row.at(5) < row.at(4));
            CHECK(row.at(6) < row.at(5));
        }
    }
}

TEST_CASE("grid error shrinks with finer transmission period at fixed W") {
    const auto signal = multitone(10000, 1.0 / 360.0);
    const auto grid = evaluate_grid(signal, 1.0 / 360.0, GridCodec::uniform_direct, RateBounds{});
    std::map<int, std::map<int, double>> by_w;
    for (const auto& p : grid) by_w[p.w][p.k] = p.ase;
    for (const auto& [w, row] : by_w) {
        for (int k : {1, 2, 4, 8, 16, 20}) {
            if (row.count(k) && row.count(2 * k)) {
                CHECK(row.at(k) <= row.at(2 * k) + 1e-12);
            }
        }
    }
}

TEST_CASE("differential grid codec evaluates a small custom grid") {
    const auto signal = ecgc::testing::synth_channel(14, 0.01, 421);
    RateBounds bounds;
    bounds.w_lower = 4;
    bounds.w_upper = 6;
    bounds.t_t_lower_s = 1.0 / 360.0;
    bounds.t_t_upper_s = 4.5 / 360.0;
    const auto grid = evaluate_grid(signal, 1.0 / 360.0, GridCodec::proposed_diff, bounds);
    CHECK(grid.size() == 3 * 4);
    for (const auto& p : grid) {
        CHECK(std::isfinite(p.ase));
        CHECK(p.ase >= 0.0);
    }
    // finer quantization still pays off at fixed K for the trained codec
    std::map<int, std::map<int, double>> by_k;
    for (const auto& p : grid) by_k[p.k][p.w] = p.ase;
    CHECK(by_k[1][6] <= by_k[1][4]);
}

TEST_CASE("optimizer matches a brute-force filtered argmin on random grids") {
    std::mt19937_64 rng(331);
    std::uniform_real_distribution<double> ase_dist(0.0, 1.0);
    std::uniform_int_distribution<int> w_dist(4, 12), k_dist(1, 40);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<RateOperatingPoint> grid;
        for (int i = 0; i < 50; ++i) {
            RateOperatingPoint p;
            p.w = w_dist(rng);
            p.k = k_dist(rng);
            p.t_t_s = p.k / 360.0;
            p.rate_bps = p.w / p.t_t_s;
            p.ase = ase_dist(rng);
            grid.push_back(p);
        }
        const double budget = std::uniform_real_distribution<double>(30.0, 5000.0)(rng);

        const RateOperatingPoint* brute = nullptr;
        for (const auto& p : grid) {
            if (p.rate_bps > budget) continue;
            if (brute == nullptr || p.ase < brute->ase ||
                (p.ase == brute->ase &&
                 (p.rate_bps < brute->rate_bps ||
                  (p.rate_bps == brute->rate_bps && p.w < brute->w)))) {
                brute = &p;
            }
        }
        if (brute == nullptr) {
            CHECK_THROWS_AS(optimize_rate(grid, budget), InfeasibleBudgetError);
        } else {
            const auto best = optimize_rate(grid, budget);
            CHECK(best.ase == brute->ase);
            CHECK(best.w == brute->w);
            CHECK(best.k == brute->k);
        }
    }
}

TEST_CASE("unconstrained budget returns the global minimizer") {
    const auto signal = ecgc::testing::synth_channel(12, 0.0, 433);
    const auto grid = evaluate_grid(signal, 1.0 / 360.0, GridCodec::uniform_direct, RateBounds{});
    const auto best = optimize_rate(grid, 1e12);
    double global = std::numeric_limits<double>::infinity();
    for (const auto& p : grid) global = std::min(global, p.ase);
    CHECK(best.ase == global);

    CHECK_THROWS_AS(optimize_rate(grid, 1.0), InfeasibleBudgetError);
    try {
        optimize_rate(grid, 1.0);
    } catch (const InfeasibleBudgetError& e) {
        // reports the minimum achievable rate: W=4 at K=40
        CHECK(e.min_achievable_rate_bps == doctest::Approx(4.0 / (40.0 / 360.0)).epsilon(1e-9));
    }
}

TEST_CASE("selected points sit on the pareto frontier of the grid") {
    const auto signal = ecgc::testing::synth_channel(12, 0.01, 439);
    const auto grid = evaluate_grid(signal, 1.0 / 360.0, GridCodec::uniform_direct, RateBounds{});
    for (double budget : {1500.0, 2000.0, 3000.0, 4400.0}) {
        const auto best = optimize_rate(grid, budget);
        for (const auto& p : grid) {
            const bool dominates = p.rate_bps < best.rate_bps && p.ase < best.ase;
            CHECK_FALSE(dominates);
        }
        CHECK(best.rate_bps <= budget);
    }
}

TEST_CASE("grid csv and optimum json carry the documented fields") {
    std::vector<RateOperatingPoint> grid;
    RateOperatingPoint p;
    p.w = 8;
    p.k = 2;
    p.t_t_s = 2.0 / 360.0;
    p.rate_bps = 8.0 / p.t_t_s;
    p.ase = 0.25;
    grid.push_back(p);
    const std::string csv = grid_to_csv(grid);
    CHECK(csv.find("W,K,Tt_s,rate_bps,ase\n") == 0);
    CHECK(csv.find("8,2,") != std::string::npos);
    const std::string json = optimum_to_json(p, 1500.0);
    CHECK(json.find("\"W\":8") != std::string::npos);
    CHECK(json.find("\"budget_bps\":1500.0") != std::string::npos);
}

} // TEST_SUITE
