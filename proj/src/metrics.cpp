#include "ecgc/metrics.hpp"

#include <cmath>

#include "ecgc/errors.hpp"

namespace ecgc {

double mse(std::span<const double> original, std::span<const double> reconstructed) {
    if (original.size() != reconstructed.size()) throw ValidationError("mse needs equal lengths");
    if (original.empty()) throw ValidationError("mse over empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        const double d = original[i] - reconstructed[i];
        sum += d * d;
    }
    return sum / static_cast<double>(original.size());
}

double nmse(std::span<const double> original, std::span<const double> reconstructed) {
    if (original.size() != reconstructed.size()) throw ValidationError("nmse needs equal lengths");
    if (original.empty()) throw ValidationError("nmse over empty input");
    double err = 0.0, power = 0.0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        const double d = original[i] - reconstructed[i];
        err += d * d;
        power += original[i] * original[i];
    }
    if (power == 0.0) throw ValidationError("nmse undefined for a zero-power original");
    return err / power;
}

double prd(std::span<const double> original, std::span<const double> reconstructed) {
    return 100.0 * std::sqrt(nmse(original, reconstructed));
}

} // namespace ecgc
