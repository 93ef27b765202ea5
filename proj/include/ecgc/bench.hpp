#pragma once

#include <string>
#include <vector>

#include "ecgc/encoded_stream.hpp"
#include "ecgc/record.hpp"

namespace ecgc {

/// Measured per-sample cost of a codec's steady-state loop.
struct ComplexityCounts {
    int adds = 0;
    int muls = 0;
    int memory_units = 0; // mutable sample-valued registers carried between samples
};

/// Run the codec's encode loop over 10^4 synthetic samples on an instrumented
/// arithmetic type and report rounded per-sample addition/multiplication
/// counts. Coefficient adaptation (LMS) is excluded; it is design-time cost,
/// not filter cost. `order` applies to olp/lms (dpcm is the M=1, a1=1
/// configuration).
ComplexityCounts count_complexity(CodecKind codec, int order = 4);

struct BenchOptions {
    double lms_step = 0.05;
    int lms_order = 4;
    int olp_order = 4;
    /// When > 0, add order x 64 bits per this many samples to the LMS rate,
    /// modelling periodic coefficient transmission.
    int lms_transmit_coeffs_every = 0;
    int histogram_bins = 200;
};

struct BenchRow {
    std::string record;
    std::string codec;
    int w = 0;
    double bits_per_sample = 0.0;
    double rate_bps = 0.0;
    double mse = 0.0;
    double nmse = 0.0;
    double prd = 0.0;
    ComplexityCounts complexity;
    bool failed = false;
    std::string error;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::string to_csv() const;
};

struct NamedRecord {
    std::string name;
    EcgRecord record;
};

/// For every (record, codec, width): train codebooks on the first half of the
/// record, encode/decode the second half, and score it. A codec failure flags
/// the row and the run continues. Deterministic given inputs.
BenchReport run_benchmark(const std::vector<NamedRecord>& corpus,
                          const std::vector<CodecKind>& codecs, const std::vector<int>& widths,
                          const BenchOptions& options = {});

} // namespace ecgc
