#pragma once

#include <span>

namespace ecgc {

/// Mean squared error.
double mse(std::span<const double> original, std::span<const double> reconstructed);

/// MSE normalized by signal power: sum (x - x-hat)^2 / sum x^2. Throws on a
/// zero-power original.
double nmse(std::span<const double> original, std::span<const double> reconstructed);

/// Percentage root-mean-square difference, 100 * sqrt(nmse).
double prd(std::span<const double> original, std::span<const double> reconstructed);

} // namespace ecgc
