// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace touchauth {

inline constexpr double kDefaultSampleRate = 500.0;

/// A uniformly sampled voltage time series.
struct Trace {
    double start_time = 0.0;                 // seconds, simulation epoch
    double sample_rate = kDefaultSampleRate;  // samples per second
    std::vector<double> samples;              // volts

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
    double duration() const noexcept {
        return static_cast<double>(samples.size()) / sample_rate;
    }
    double period() const noexcept { return 1.0 / sample_rate; }
    double time_at(std::size_t i) const noexcept {
        return start_time + static_cast<double>(i) / sample_rate;
    }
    std::span<const double> view() const noexcept { return samples; }

    /// The trailing `n` samples as a new trace. Throws if n > size().
    Trace tail(std::size_t n) const;

    bool operator==(const Trace&) const = default;
};

/// Sample count covering `seconds` at `sample_rate` (rounded to nearest).
std::size_t samples_for(double seconds, double sample_rate);

/// Throws InvalidArgument when sample_rate <= 0 or samples are empty.
void validate(const Trace& t);

// CSV with header `t_seconds,volts`, 12 significant digits.
void write_csv(std::ostream& os, const Trace& t);
void write_csv(const std::string& path, const Trace& t);
Trace read_csv(std::istream& is);
Trace read_csv(const std::string& path);

}  // namespace touchauth
