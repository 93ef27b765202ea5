#include "ecgc/record.hpp"

#include <algorithm>
#include <cmath>

#include "ecgc/errors.hpp"

namespace ecgc {

namespace {

void check_annotation_axis(const std::vector<std::size_t>& idx, std::size_t length,
                           const char* wave) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= length) {
            throw ValidationError(std::string("annotation index out of bounds for wave ") + wave);
        }
        if (i > 0 && idx[i] <= idx[i - 1]) {
            throw ValidationError(std::string("annotation indices not strictly increasing for wave ") +
                                  wave);
        }
    }
}

} // namespace

void EcgRecord::validate() const {
    if (!(sample_period_s > 0.0)) {
        throw ValidationError("sample_period_s must be positive");
    }
    if (channels.empty()) {
        throw ValidationError("record has no channels");
    }
    const std::size_t n = channels.front().samples.size();
    if (n < 2) {
        throw ValidationError("channels must hold at least 2 samples");
    }
    for (const auto& ch : channels) {
        if (ch.samples.size() != n) {
            throw ValidationError("channel '" + ch.name + "' length differs from the first channel");
        }
    }
    if (annotations) {
        check_annotation_axis(annotations->p, n, "P");
        check_annotation_axis(annotations->q, n, "Q");
        check_annotation_axis(annotations->r, n, "R");
        check_annotation_axis(annotations->s, n, "S");
        check_annotation_axis(annotations->t, n, "T");
    }
}

void SyntheticEcgSpec::validate() const {
    if (beats < 1) throw ValidationError("beats must be >= 1");
    if (!(beat_period_s > 0.0)) throw ValidationError("beat_period_s must be positive");
    const double durations[] = {p_dur_s, q_dur_s, r_dur_s, s_dur_s, t_dur_s};
    double total = 0.0;
    double smallest = durations[0];
    for (double d : durations) {
        if (!(d > 0.0)) throw ValidationError("wave durations must be positive");
        total += d;
        smallest = std::min(smallest, d);
    }
    if (!(total < beat_period_s)) {
        throw ValidationError("wave durations must sum to less than the beat period");
    }
    if (!(sample_period_s > 0.0) || !(sample_period_s < smallest / 2.0)) {
        throw ValidationError("sample_period_s must be below half the smallest wave duration");
    }
    if (!(noise_std_mv >= 0.0) || !std::isfinite(noise_std_mv)) {
        throw ValidationError("noise_std_mv must be finite and non-negative");
    }
}

} // namespace ecgc
