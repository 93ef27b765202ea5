#include "ecgc/stability.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "ecgc/errors.hpp"

namespace ecgc {

ErrorTransferFunction open_loop_tf(std::span<const double> coefficients) {
    if (coefficients.empty()) throw ValidationError("transfer function needs degree >= 1");
    ErrorTransferFunction tf;
    tf.tag = "open_loop";
    tf.denominator.reserve(coefficients.size() + 1);
    tf.denominator.push_back(1.0);
    for (double a : coefficients) {
        if (!std::isfinite(a)) throw ValidationError("non-finite predictor coefficient");
        tf.denominator.push_back(-a);
    }
    return tf;
}

ErrorTransferFunction proposed_scheme_tf(double beta_abs) {
    if (!(beta_abs > 0.0 && beta_abs < 2.0)) {
        throw ValidationError("beta magnitude must lie in (0, 2) to keep the pole inside the unit circle");
    }
    ErrorTransferFunction tf;
    tf.tag = "proposed";
    tf.denominator = {1.0, -(1.0 - beta_abs)};
    return tf;
}

StabilityReport poles_of(const ErrorTransferFunction& tf) {
    const int degree = tf.degree();
    if (degree < 1) throw ValidationError("transfer function degree must be >= 1");
    if (tf.denominator.front() != 1.0) {
        throw ValidationError("transfer function denominator must be monic");
    }

    // Companion matrix of z^M - a_1 z^(M-1) - ... - a_M; denominator stores -a_m.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (int m = 0; m < degree; ++m) companion(0, m) = -tf.denominator[m + 1];
    for (int r = 1; r < degree; ++r) companion(r, r - 1) = 1.0;

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw NumericError("eigenvalue solver failed");

    StabilityReport report;
    report.poles.reserve(degree);
    for (int i = 0; i < degree; ++i) {
        report.poles.emplace_back(solver.eigenvalues()(i).real(), solver.eigenvalues()(i).imag());
    }
    std::sort(report.poles.begin(), report.poles.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });

    report.max_modulus = 0.0;
    for (const auto& p : report.poles) report.max_modulus = std::max(report.max_modulus, std::abs(p));
    report.margin = 1.0 - report.max_modulus;

    constexpr double kMarginalBand = 1e-9;
    report.marginal = std::any_of(report.poles.begin(), report.poles.end(), [&](const auto& p) {
        return std::abs(std::abs(p) - 1.0) <= kMarginalBand;
    });
    // Marginal poles are treated as unstable: near-unit poles already defeat
    // the reconstruction in practice.
    report.stable = report.max_modulus < 1.0 && !report.marginal;
    return report;
}

std::string StabilityReport::to_json() const {
    nlohmann::json j;
    auto& arr = j["poles"] = nlohmann::json::array();
    for (const auto& p : poles) arr.push_back({p.real(), p.imag()});
    j["max_modulus"] = max_modulus;
    j["stable"] = stable;
    j["margin"] = margin;
    j["marginal"] = marginal;
    return j.dump();
}

} // namespace ecgc
