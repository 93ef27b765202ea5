#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "ecgc/record.hpp"

namespace ecgc {

enum class RecordFormat { csv, raw_binary };

/// Picks csv for ".csv", raw binary for anything else (".ecg1" canonical).
RecordFormat format_from_extension(const std::filesystem::path& path);

/// Load a record. For csv the first column is treated as a time axis only
/// when its header cell is exactly "t"; the sample period is then derived
/// from the first two time values. Headerless csv (or csv without a "t"
/// column) falls back to `default_period_s`.
EcgRecord load_record(const std::filesystem::path& path, RecordFormat format,
                      double default_period_s = 1.0 / 360.0);

/// Save a record. csv writes a "t" column plus one column per channel at
/// full round-trip precision; raw binary is the "ECG1" little-endian layout
/// (u32 channel count, u32 sample count, f64 period, per-channel f64 data).
/// Channel names and annotations are csv-only / in-memory-only respectively.
void save_record(const EcgRecord& record, const std::filesystem::path& path, RecordFormat format);

/// Deterministic synthetic ECG: `beats` repetitions of a raised-cosine
/// P-QRS-T template plus Gaussian noise, annotations set to the true summit
/// indices. Pure in (spec, seed).
EcgRecord synthesize_ecg(const SyntheticEcgSpec& spec, std::uint64_t seed);

/// Keep-every-kth followed by zero-order hold, on the original sample grid:
/// out[m] = in[m - m % k]. k = 1 is the identity.
EcgRecord downsample_hold(const EcgRecord& record, int k);
std::vector<double> downsample_hold(std::span<const double> samples, int k);

/// Samples at indices 0, k, 2k, ... (the transmitted subsequence).
std::vector<double> decimate(std::span<const double> samples, int k);

/// Adjacent differences x[i] - x[i-1], length n - 1.
std::vector<double> adjacent_differences(std::span<const double> samples);

} // namespace ecgc
