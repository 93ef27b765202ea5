#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "ecgc/errors.hpp"
#include "ecgc/predictors.hpp"
#include "ecgc/stability.hpp"

using namespace ecgc;

namespace {

// largest |p(r)| over the reported roots, scaled by the coefficient magnitude
// of p(z) = z^M + d_1 z^(M-1) + ... + d_M (denominator tail d)
double max_scaled_residual(const ErrorTransferFunction& tf, const StabilityReport& report) {
    double worst = 0.0;
    const int degree = tf.degree();
    for (const auto& root : report.poles) {
        std::complex<double> acc = std::pow(root, degree);
        double scale = std::pow(std::abs(root), degree);
        for (int m = 1; m <= degree; ++m) {
            acc += tf.denominator[static_cast<std::size_t>(m)] * std::pow(root, degree - m);
            scale += std::abs(tf.denominator[static_cast<std::size_t>(m)]) *
                     std::pow(std::abs(root), degree - m);
        }
        worst = std::max(worst, std::abs(acc) / std::max(scale, 1e-30));
    }
    return worst;
}

bool contains_pole(const StabilityReport& report, double re, double im, double tol) {
    return std::any_of(report.poles.begin(), report.poles.end(), [&](const auto& p) {
        return std::abs(p.real() - re) <= tol && std::abs(p.imag() - im) <= tol;
    });
}

} // namespace

TEST_SUITE("stability") {

TEST_CASE("first-order transfer function has its coefficient as the pole") {
    const auto report = poles_of(open_loop_tf(std::vector<double>{0.5}));
    REQUIRE(report.poles.size() == 1);
    CHECK(report.poles[0].real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(report.poles[0].imag() == doctest::Approx(0.0));
    CHECK(report.stable);
    CHECK(report.margin == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fourth-order coefficient set a reproduces the published poles") {
    const std::vector<double> coeffs = {-0.1436, -0.2120, 0.1582, 1.1548};
    const auto tf = open_loop_tf(coeffs);
    const auto report = poles_of(tf);
    REQUIRE(report.poles.size() == 4);
    CHECK(contains_pole(report, -0.9823, 0.0, 1e-3));
    CHECK(contains_pole(report, -0.0761, 1.0866, 1e-3));
    CHECK(contains_pole(report, -0.0761, -1.0866, 1e-3));
    CHECK(contains_pole(report, 0.9908, 0.0, 1e-3));
    CHECK_FALSE(report.stable);
    CHECK(max_scaled_residual(tf, report) < 1e-8);
}

TEST_CASE("fourth-order coefficient set b reproduces the published poles") {
    const std::vector<double> coeffs = {-0.2276, -0.2041, 0.2512, 1.1761};
    const auto report = poles_of(open_loop_tf(coeffs));
    REQUIRE(report.poles.size() == 4);
    CHECK(contains_pole(report, -0.9868, 0.0, 1e-3));
    CHECK(contains_pole(report, -0.1200, 1.0856, 1e-3));
    CHECK(contains_pole(report, -0.1200, -1.0856, 1e-3));
    CHECK(contains_pole(report, 0.9991, 0.0, 1e-3));
    CHECK_FALSE(report.stable);
}

TEST_CASE("proposed-scheme transfer function pins the pole at 1 - |beta|") {
    SUBCASE("beta 1 puts the pole at the origin") {
        const auto report = poles_of(proposed_scheme_tf(1.0));
        REQUIRE(report.poles.size() == 1);
        CHECK(std::abs(report.poles[0]) < 1e-12);
        CHECK(report.stable);
    }
    SUBCASE("beta 0.1 gives pole 0.9") {
        const auto report = poles_of(proposed_scheme_tf(0.1));
        CHECK(report.poles[0].real() == doctest::Approx(0.9).epsilon(1e-12));
        CHECK(report.stable);
        CHECK(report.margin == doctest::Approx(0.1).epsilon(1e-9));
    }
    SUBCASE("beta 1.9 gives pole -0.9") {
        const auto report = poles_of(proposed_scheme_tf(1.9));
        CHECK(report.poles[0].real() == doctest::Approx(-0.9).epsilon(1e-12));
        CHECK(report.stable);
    }
    SUBCASE("beta outside (0, 2) is rejected") {
        CHECK_THROWS_AS(proposed_scheme_tf(0.0), ValidationError);
        CHECK_THROWS_AS(proposed_scheme_tf(2.0), ValidationError);
        CHECK_THROWS_AS(proposed_scheme_tf(-0.3), ValidationError);
    }
}

TEST_CASE("marginal poles are flagged and classified unstable") {
    const auto report = poles_of(open_loop_tf(std::vector<double>{1.0}));
    CHECK(report.marginal);
    CHECK_FALSE(report.stable);
}

TEST_CASE("appending zero coefficients only adds poles at the origin") {
    const auto base = poles_of(open_loop_tf(std::vector<double>{0.3, -0.4}));
    const auto padded = poles_of(open_loop_tf(std::vector<double>{0.3, -0.4, 0.0, 0.0}));
    CHECK(padded.poles.size() == 4);
    CHECK(padded.max_modulus == doctest::Approx(base.max_modulus).epsilon(1e-9));
    // a defective double zero splits by ~sqrt(machine epsilon)
    int zeros = 0;
    for (const auto& p : padded.poles) {
        if (std::abs(p) < 1e-6) ++zeros;
    }
    CHECK(zeros == 2);
}

TEST_CASE("simulated open-loop error recursion grows iff a pole leaves the unit circle") {
    // impulse quantization error through the reconstruction recursion
    auto simulate_growth = [](const std::vector<double>& coeffs) {
        const int order = static_cast<int>(coeffs.size());
        std::vector<double> e(10000, 0.0);
        for (std::size_t i = static_cast<std::size_t>(order); i < e.size(); ++i) {
            double acc = i == static_cast<std::size_t>(order) ? 1.0 : 0.0; // unit impulse e_q
            for (int m = 1; m <= order; ++m) acc += coeffs[static_cast<std::size_t>(m - 1)] * e[i - m];
            e[i] = acc;
            if (!std::isfinite(e[i]) || std::abs(e[i]) > 1e3) return true;
        }
        return false;
    };

    const std::vector<std::vector<double>> cases = {
        {0.5}, {1.2}, {-0.1436, -0.2120, 0.1582, 1.1548}, {0.4, -0.3}, {0.9, -0.5, 0.2},
    };
    for (const auto& coeffs : cases) {
        const auto report = poles_of(open_loop_tf(coeffs));
        CHECK(simulate_growth(coeffs) == (report.max_modulus > 1.0));
    }
}

TEST_CASE("stability report serializes the documented json keys") {
    const auto report = poles_of(open_loop_tf(std::vector<double>{0.5}));
    const std::string json = report.to_json();
    CHECK(json.find("\"poles\"") != std::string::npos);
    CHECK(json.find("\"max_modulus\"") != std::string::npos);
    CHECK(json.find("\"stable\"") != std::string::npos);
    CHECK(json.find("\"margin\"") != std::string::npos);
}

TEST_CASE("degree zero is rejected") {
    ErrorTransferFunction tf;
    tf.denominator = {1.0};
    CHECK_THROWS_AS(poles_of(tf), ValidationError);
}

} // TEST_SUITE
