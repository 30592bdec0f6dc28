// SPDX-License-Identifier: Apache-2.0
#include "touchauth/trace.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "touchauth/error.hpp"

namespace touchauth {

Trace Trace::tail(std::size_t n) const {
    if (n > samples.size()) throw InvalidArgument("tail longer than trace");
    Trace out;
    out.sample_rate = sample_rate;
    out.start_time = time_at(samples.size() - n);
    out.samples.assign(samples.end() - static_cast<std::ptrdiff_t>(n), samples.end());
    return out;
}

std::size_t samples_for(double seconds, double sample_rate) {
    if (!(seconds > 0.0) || !(sample_rate > 0.0)) {
        throw InvalidArgument("length and sample rate must be positive");
    }
    return static_cast<std::size_t>(std::llround(seconds * sample_rate));
}

void validate(const Trace& t) {
    if (!(t.sample_rate > 0.0)) throw InvalidArgument("trace sample_rate must be > 0");
    if (t.samples.empty()) throw InvalidArgument("trace has no samples");
}

void write_csv(std::ostream& os, const Trace& t) {
    os << "t_seconds,volts\n";
    char buf[80];
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", t.time_at(i), t.samples[i]);
        os << buf;
    }
}

void write_csv(const std::string& path, const Trace& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    write_csv(os, t);
    if (!os) throw IoError("write failed: " + path);
}

Trace read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw IoError("empty trace CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t_seconds,volts") throw IoError("trace CSV header must be t_seconds,volts");

    std::vector<double> times;
    Trace t;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError("malformed trace row: " + line);
        try {
            times.push_back(std::stod(line.substr(0, comma)));
            t.samples.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw IoError("malformed trace row: " + line);
        }
    }
    if (t.samples.empty()) throw IoError("trace CSV has no rows");
    t.start_time = times.front();
    if (times.size() >= 2) {
        const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
        if (!(dt > 0.0)) throw IoError("trace CSV times must increase");
        // Round to the nearest 1e-6 Hz; the file only carries 12 digits.
        t.sample_rate = std::round(1e6 / dt) / 1e6;
    }
    return t;
}

Trace read_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    return read_csv(is);
}

}  // namespace touchauth
