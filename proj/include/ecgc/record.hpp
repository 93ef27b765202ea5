#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ecgc {

/// Per-beat sample indices of the five wave summits.
struct Annotations {
    std::vector<std::size_t> p, q, r, s, t;
};

struct Channel {
    std::string name;
    std::vector<double> samples; // amplitudes in millivolts
};

/// Uniformly sampled single- or multi-channel ECG record. Amplitudes are kept
/// as 64-bit floats in millivolts regardless of the source bit width; word
/// length enters only inside the codecs.
struct EcgRecord {
    double sample_period_s = 0.0;
    std::vector<Channel> channels;
    std::optional<Annotations> annotations;

    std::size_t length() const { return channels.empty() ? 0 : channels.front().samples.size(); }

    /// Throws ValidationError when any structural invariant is violated.
    void validate() const;
};

/// Parameters of the synthetic P-QRS-T generator. Each wave is a raised-cosine
/// lobe; the five lobes are laid out in order with equal margins inside one
/// beat period, so they never overlap as long as the invariants hold.
struct SyntheticEcgSpec {
    int beats = 1;
    double beat_period_s = 0.8;
    double p_mv = 0.15, q_mv = -0.1, r_mv = 1.0, s_mv = -0.2, t_mv = 0.3;
    double p_dur_s = 0.09, q_dur_s = 0.03, r_dur_s = 0.04, s_dur_s = 0.03, t_dur_s = 0.14;
    double noise_std_mv = 0.0;
    double sample_period_s = 1.0 / 360.0;

    void validate() const;
};

} // namespace ecgc
