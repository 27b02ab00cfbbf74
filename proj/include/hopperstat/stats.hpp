#ifndef HOPPERSTAT_STATS_HPP
#define HOPPERSTAT_STATS_HPP

#include <cmath>
#include <cstddef>
#include <string>

#include "hopperstat/errors.hpp"
#include "hopperstat/image.hpp"

namespace hopperstat {

/// Population statistics of one line sample (divide by N).
struct LineStats {
    double mean = 0.0;
    double sigma = 0.0;
    double variance = 0.0;
    std::size_t count = 0;
};

/// Candidate classification scores combined from two lines:
/// a1 = (sigma1+sigma2)/2, a1_sq = a1^2, a2 = (sigma1^2+sigma2^2)/2.
struct ScoreVector {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double a1 = 0.0;
    double a1_sq = 0.0;
    double a2 = 0.0;
};

/// Two-pass population mean/variance/sigma over a line sample.
inline LineStats line_stats(const LineSample& sample) {
    if (sample.values.empty())
        throw EmptySample("line '" + sample.line_name + "' has no pixels");

    const double n = static_cast<double>(sample.values.size());
    double sum = 0.0;
    for (auto v : sample.values) sum += v;
    const double mean = sum / n;

    double sq = 0.0;
    for (auto v : sample.values) {
        const double d = v - mean;
        sq += d * d;
    }

    LineStats st;
    st.mean = mean;
    st.variance = sq / n;
    st.sigma = std::sqrt(st.variance);
    st.count = sample.values.size();
    return st;
}

inline ScoreVector combine_scores(const LineStats& l1, const LineStats& l2) {
    ScoreVector s;
    s.sigma1 = l1.sigma;
    s.sigma2 = l2.sigma;
    s.a1 = (l1.sigma + l2.sigma) / 2.0;
    s.a1_sq = s.a1 * s.a1;
    s.a2 = (l1.variance + l2.variance) / 2.0;
    return s;
}

} // namespace hopperstat

#endif // HOPPERSTAT_STATS_HPP
