#include "ecgc/signal_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "ecgc/errors.hpp"

namespace ecgc {

namespace {

constexpr char kMagic[4] = {'E', 'C', 'G', '1'};

void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    std::array<char, 8> bytes;
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    out.write(bytes.data(), 8);
}

void write_u32(std::ostream& out, std::uint32_t v) {
    std::array<char, 4> bytes;
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(bytes.data(), 4);
}

double read_f64(std::istream& in) {
    std::array<unsigned char, 8> bytes;
    in.read(reinterpret_cast<char*>(bytes.data()), 8);
    if (!in) throw ParseError("unexpected end of file while reading f64");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

std::uint32_t read_u32(std::istream& in) {
    std::array<unsigned char, 4> bytes;
    in.read(reinterpret_cast<char*>(bytes.data()), 4);
    if (!in) throw ParseError("unexpected end of file while reading u32");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding whitespace
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_double(const std::string& cell, double& out) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && !cell.empty();
}

EcgRecord load_csv(const std::filesystem::path& path, double default_period_s) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> names;
    bool has_time_column = false;
    std::vector<std::vector<double>> columns;
    std::vector<double> time_values;

    auto ingest_row = [&](const std::vector<std::string>& cells) {
        if (columns.empty()) {
            const std::size_t data_cols = cells.size() - (has_time_column ? 1 : 0);
            if (data_cols == 0) {
                throw ParseError(path.string() + ":" + std::to_string(line_no) +
                                 ": no data columns");
            }
            columns.resize(data_cols);
        }
        const std::size_t expected = columns.size() + (has_time_column ? 1 : 0);
        if (cells.size() != expected) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(expected) + " columns, got " +
                             std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double v;
            if (!parse_double(cells[c], v)) {
                throw ParseError(path.string() + ":" + std::to_string(line_no) + ": column " +
                                 std::to_string(c + 1) + ": non-numeric cell '" + cells[c] + "'");
            }
            if (has_time_column && c == 0) {
                time_values.push_back(v);
            } else {
                columns[c - (has_time_column ? 1 : 0)].push_back(v);
            }
        }
    };

    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        const auto cells = split_csv_line(line);
        if (first) {
            first = false;
            double probe;
            const bool numeric_row = !cells.empty() && parse_double(cells[0], probe);
            if (!numeric_row) {
                for (const auto& c : cells) {
                    if (c.empty()) {
                        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                                         ": empty header cell");
                    }
                }
                has_time_column = (cells[0] == "t");
                names.assign(cells.begin() + (has_time_column ? 1 : 0), cells.end());
                continue;
            }
        }
        ingest_row(cells);
    }
    if (columns.empty() || columns.front().empty()) {
        throw ParseError(path.string() + ": no data rows");
    }

    EcgRecord record;
    if (time_values.size() >= 2) {
        record.sample_period_s = time_values[1] - time_values[0];
        if (!(record.sample_period_s > 0.0)) {
            throw ParseError(path.string() + ": time column is not increasing");
        }
    } else {
        record.sample_period_s = default_period_s;
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
        Channel ch;
        ch.name = c < names.size() ? names[c] : "ch" + std::to_string(c + 1);
        ch.samples = std::move(columns[c]);
        record.channels.push_back(std::move(ch));
    }
    record.validate();
    return record;
}

EcgRecord load_raw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw ParseError(path.string() + ": offset 0: bad magic, expected ECG1");
    }
    const std::uint32_t channel_count = read_u32(in);
    const std::uint32_t sample_count = read_u32(in);
    if (channel_count == 0 || channel_count > 64) {
        throw ParseError(path.string() + ": offset 4: implausible channel count " +
                         std::to_string(channel_count));
    }
    EcgRecord record;
    record.sample_period_s = read_f64(in);
    for (std::uint32_t c = 0; c < channel_count; ++c) {
        Channel ch;
        ch.name = "ch" + std::to_string(c + 1);
        ch.samples.reserve(sample_count);
        for (std::uint32_t i = 0; i < sample_count; ++i) ch.samples.push_back(read_f64(in));
        record.channels.push_back(std::move(ch));
    }
    record.validate();
    return record;
}

void save_csv(const EcgRecord& record, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "t";
    for (const auto& ch : record.channels) out << ',' << ch.name;
    out << '\n';
    char buf[32];
    const std::size_t n = record.length();
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", static_cast<double>(i) * record.sample_period_s);
        out << buf;
        for (const auto& ch : record.channels) {
            std::snprintf(buf, sizeof(buf), "%.17g", ch.samples[i]);
            out << ',' << buf;
        }
        out << '\n';
    }
}

void save_raw(const EcgRecord& record, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(kMagic, 4);
    write_u32(out, static_cast<std::uint32_t>(record.channels.size()));
    write_u32(out, static_cast<std::uint32_t>(record.length()));
    write_f64(out, record.sample_period_s);
    for (const auto& ch : record.channels) {
        for (double v : ch.samples) write_f64(out, v);
    }
}

} // namespace

RecordFormat format_from_extension(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? RecordFormat::csv : RecordFormat::raw_binary;
}

EcgRecord load_record(const std::filesystem::path& path, RecordFormat format,
                      double default_period_s) {
    if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
    return format == RecordFormat::csv ? load_csv(path, default_period_s) : load_raw(path);
}

void save_record(const EcgRecord& record, const std::filesystem::path& path, RecordFormat format) {
    record.validate();
    if (format == RecordFormat::csv) {
        save_csv(record, path);
    } else {
        save_raw(record, path);
    }
}

EcgRecord synthesize_ecg(const SyntheticEcgSpec& spec, std::uint64_t seed) {
    spec.validate();

    const double durations[] = {spec.p_dur_s, spec.q_dur_s, spec.r_dur_s, spec.s_dur_s,
                                spec.t_dur_s};
    const double amplitudes[] = {spec.p_mv, spec.q_mv, spec.r_mv, spec.s_mv, spec.t_mv};
    double total_dur = 0.0;
    for (double d : durations) total_dur += d;
    // Five lobes laid out in order with six equal margins filling the beat.
    const double margin = (spec.beat_period_s - total_dur) / 6.0;
    double centers[5];
    double cursor = margin;
    for (int w = 0; w < 5; ++w) {
        centers[w] = cursor + durations[w] / 2.0;
        cursor += durations[w] + margin;
    }

    const std::size_t samples_per_beat =
        static_cast<std::size_t>(std::floor(spec.beat_period_s / spec.sample_period_s));
    const std::size_t n = samples_per_beat * static_cast<std::size_t>(spec.beats);

    EcgRecord record;
    record.sample_period_s = spec.sample_period_s;
    Channel ch;
    ch.name = "synth";
    ch.samples.resize(n, 0.0);

    Annotations ann;
    std::vector<std::size_t>* waves[5] = {&ann.p, &ann.q, &ann.r, &ann.s, &ann.t};

    for (int beat = 0; beat < spec.beats; ++beat) {
        const double beat_start = beat * spec.beat_period_s;
        for (int w = 0; w < 5; ++w) {
            const double c = beat_start + centers[w];
            const double half = durations[w] / 2.0;
            const std::size_t lo =
                static_cast<std::size_t>(std::max(0.0, std::ceil((c - half) / spec.sample_period_s)));
            const std::size_t hi = std::min(
                n == 0 ? 0 : n - 1,
                static_cast<std::size_t>(std::floor((c + half) / spec.sample_period_s)));
            for (std::size_t i = lo; i <= hi && i < n; ++i) {
                const double t = i * spec.sample_period_s;
                ch.samples[i] +=
                    amplitudes[w] * 0.5 * (1.0 + std::cos(2.0 * M_PI * (t - c) / durations[w]));
            }
            const std::size_t summit =
                std::min(n == 0 ? 0 : n - 1,
                         static_cast<std::size_t>(std::llround(c / spec.sample_period_s)));
            waves[w]->push_back(summit);
        }
    }

    if (spec.noise_std_mv > 0.0) {
        // Box-Muller over mt19937_64 keeps the output identical across
        // standard library implementations.
        std::mt19937_64 rng(seed);
        auto uniform01 = [&rng]() {
            return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
        };
        for (std::size_t i = 0; i < n; i += 2) {
            const double u1 = uniform01();
            const double u2 = uniform01();
            const double radius = std::sqrt(-2.0 * std::log(u1));
            ch.samples[i] += spec.noise_std_mv * radius * std::cos(2.0 * M_PI * u2);
            if (i + 1 < n) {
                ch.samples[i + 1] += spec.noise_std_mv * radius * std::sin(2.0 * M_PI * u2);
            }
        }
    }

    record.channels.push_back(std::move(ch));
    record.annotations = std::move(ann);
    record.validate();
    return record;
}

std::vector<double> downsample_hold(std::span<const double> samples, int k) {
    if (k < 1) throw ValidationError("downsample factor k must be >= 1");
    std::vector<double> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out[i] = samples[i - i % static_cast<std::size_t>(k)];
    }
    return out;
}

EcgRecord downsample_hold(const EcgRecord& record, int k) {
    record.validate();
    EcgRecord out = record;
    for (auto& ch : out.channels) {
        ch.samples = downsample_hold(std::span<const double>(ch.samples), k);
    }
    return out;
}

std::vector<double> decimate(std::span<const double> samples, int k) {
    if (k < 1) throw ValidationError("downsample factor k must be >= 1");
    std::vector<double> out;
    out.reserve(samples.size() / k + 1);
    for (std::size_t i = 0; i < samples.size(); i += static_cast<std::size_t>(k)) {
        out.push_back(samples[i]);
    }
    return out;
}

std::vector<double> adjacent_differences(std::span<const double> samples) {
    if (samples.size() < 2) return {};
    std::vector<double> out(samples.size() - 1);
    for (std::size_t i = 1; i < samples.size(); ++i) out[i - 1] = samples[i] - samples[i - 1];
    return out;
}

} // namespace ecgc
