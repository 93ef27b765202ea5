#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace ecgc {

/// Denominator of a reconstruction-error transfer function,
/// 1 - sum_m a_m z^-m, stored as {1, -a_1, ..., -a_M}.
struct ErrorTransferFunction {
    std::vector<double> denominator;
    std::string tag; // "open_loop" or "proposed"

    int degree() const { return static_cast<int>(denominator.size()) - 1; }
};

struct StabilityReport {
    std::vector<std::complex<double>> poles; // sorted by (re, im)
    double max_modulus = 0.0;
    bool stable = false;   // strictly max_modulus < 1
    double margin = 0.0;   // 1 - max_modulus
    bool marginal = false; // any |pole| within 1e-9 of the unit circle

    std::string to_json() const;
};

/// Error transfer function of the open-loop predictive codec for a given
/// coefficient vector a_1..a_M.
ErrorTransferFunction open_loop_tf(std::span<const double> coefficients);

/// First-order error transfer function of the differential codec under the
/// beta abstraction of its modification factor; pole at 1 - |beta|, inside
/// the unit circle for beta_abs in (0, 2).
ErrorTransferFunction proposed_scheme_tf(double beta_abs);

/// Poles as eigenvalues of the companion matrix of
/// z^M - a_1 z^(M-1) - ... - a_M. Marginal poles (within 1e-9 of modulus 1)
/// are classified unstable and flagged.
StabilityReport poles_of(const ErrorTransferFunction& tf);

} // namespace ecgc
