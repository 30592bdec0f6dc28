// SPDX-License-Identifier: Apache-2.0
#include "touchauth/detector.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "touchauth/error.hpp"
#include "touchauth/kernels.hpp"

namespace touchauth {
namespace {

void require_comparable(const Trace& x, const Trace& y, std::size_t min_len) {
    if (x.size() != y.size()) throw LengthMismatch("traces differ in length");
    if (x.sample_rate != y.sample_rate) throw LengthMismatch("traces differ in sample rate");
    if (x.size() < min_len) throw InvalidArgument("trace too short for this metric");
}

}  // namespace

void validate(const DetectorConfig& cfg) {
    if (!(cfg.threshold_eta >= 0.0)) throw InvalidArgument("threshold_eta must be >= 0");
    if (!(cfg.signal_length_seconds > 0.0)) throw InvalidArgument("signal length must be > 0");
    if (!(cfg.gate_std_volts >= 0.0)) throw InvalidArgument("gate_std_volts must be >= 0");
    if (!(cfg.sample_rate > 0.0)) throw InvalidArgument("sample_rate must be > 0");
}

double apcc(const Trace& x, const Trace& y) {
    require_comparable(x, y, 2);
    // Two passes: means first, then centered moments. The centered form keeps
    // affine invariance tight for traces riding on a large offset.
    const double mx = kernels::mean(x.view());
    const double my = kernels::mean(y.view());
    const kernels::CrossMoments m = kernels::centered_cross(x.view(), y.view(), mx, my);
    if (m.sxx <= 0.0 || m.syy <= 0.0) throw ZeroVariance("constant trace has no correlation");
    const double r = std::abs(m.sxy) / (std::sqrt(m.sxx) * std::sqrt(m.syy));
    return std::min(r, 1.0);
}

double rmse(const Trace& x, const Trace& y) {
    require_comparable(x, y, 1);
    return std::sqrt(kernels::sum_squared_diff(x.view(), y.view()) /
                     static_cast<double>(x.size()));
}

double similarity(Metric metric, const Trace& x, const Trace& y) {
    if (metric == Metric::Apcc) return apcc(x, y);
    const double e = rmse(x, y);
    return e > 0.0 ? std::min(1.0 / e, kScoreMax) : kScoreMax;
}

double population_std(const Trace& t) {
    if (t.empty()) throw InvalidArgument("std of empty trace");
    const double m = kernels::mean(t.view());
    return std::sqrt(kernels::centered_sum_squares(t.view(), m) / static_cast<double>(t.size()));
}

bool gate(const Trace& t, double gate_std_volts) { return population_std(t) >= gate_std_volts; }

Decision detect(const DetectorConfig& cfg, const Trace& s, const Trace& s_prime) {
    validate(cfg);
    validate(s);
    validate(s_prime);
    if (s.sample_rate != s_prime.sample_rate) throw LengthMismatch("traces differ in sample rate");
    const std::size_t n = samples_for(cfg.signal_length_seconds, s.sample_rate);
    if (s.size() < n || s_prime.size() < n) {
        throw InvalidArgument("traces shorter than the signal length");
    }
    const Trace a = s.tail(n);
    const Trace b = s_prime.tail(n);

    Decision d;
    d.metric = cfg.metric;
    if (!gate(a, cfg.gate_std_volts) || !gate(b, cfg.gate_std_volts)) {
        d.outcome = Outcome::RejectGate;
        return d;
    }
    try {
        d.score = similarity(cfg.metric, a, b);
    } catch (const ZeroVariance&) {
        // Only reachable with a zero gate threshold.
        d.outcome = Outcome::RejectGate;
        return d;
    }
    d.outcome = *d.score > cfg.threshold_eta ? Outcome::Accept : Outcome::RejectScore;
    return d;
}

double sdr(const Trace& s, const Trace& s_prime) {
    require_comparable(s, s_prime, 1);
    const double n = static_cast<double>(s.size());
    const double signal = kernels::sum_squares(s.view()) / n;
    if (signal <= 0.0) throw InvalidArgument("SDR undefined for an all-zero signal");
    const double diff = kernels::sum_squared_diff(s.view(), s_prime.view()) / n;
    if (diff <= std::numeric_limits<double>::epsilon() * signal) return kScoreMax;
    return 10.0 * std::log10(signal / diff);
}

std::string to_string(Metric m) { return m == Metric::Apcc ? "apcc" : "rmse"; }

Metric metric_from_string(const std::string& s) {
    if (s == "apcc" || s == "APCC") return Metric::Apcc;
    if (s == "rmse" || s == "RMSE_RECIP" || s == "rmse_recip") return Metric::RmseRecip;
    throw InvalidArgument("unknown metric: " + s);
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::Accept: return "ACCEPT";
        case Outcome::RejectGate: return "REJECT_GATE";
        case Outcome::RejectScore: return "REJECT_SCORE";
    }
    return "REJECT_GATE";
}

std::string decision_csv_header() { return "metric,eta,length_s,outcome,score"; }

std::string to_csv_row(const DetectorConfig& cfg, const Decision& d) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%s,", to_string(cfg.metric).c_str(),
                  cfg.threshold_eta, cfg.signal_length_seconds, to_string(d.outcome).c_str());
    std::string row = buf;
    if (d.score) {
        std::snprintf(buf, sizeof buf, "%.12g", *d.score);
        row += buf;
    }
    return row;
}

}  // namespace touchauth
