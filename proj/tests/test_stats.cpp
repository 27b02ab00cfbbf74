#include <doctest.h>

#include <random>

#include "hopperstat/stats.hpp"
#include "test_util.hpp"

using namespace hopperstat;

namespace {
LineSample sample_of(std::vector<std::uint8_t> v) { return LineSample{"L", std::move(v)}; }

bool close_rel(double a, double b, double tol = 1e-9) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}
} // namespace

TEST_CASE("line_stats spot values") {
    auto st = line_stats(sample_of({5, 5, 5, 5}));
    CHECK(st.mean == 5.0);
    CHECK(st.sigma == 0.0);
    CHECK(st.variance == 0.0);

    st = line_stats(sample_of({0, 2}));
    CHECK(st.mean == 1.0);
    CHECK(st.sigma == 1.0);
    CHECK(st.variance == 1.0);

    st = line_stats(sample_of({1, 2, 3, 4}));
    CHECK(st.mean == doctest::Approx(2.5));
    CHECK(st.variance == doctest::Approx(1.25)); // sum of squared devs = 5, N = 4
    CHECK(st.sigma == doctest::Approx(1.1180339887498949));
}

TEST_CASE("line_stats guards the empty sample") {
    CHECK_THROWS_AS(line_stats(sample_of({})), EmptySample);
}

TEST_CASE("single pixel has zero spread") {
    const auto st = line_stats(sample_of({200}));
    CHECK(st.count == 1);
    CHECK(st.sigma == 0.0);
}

TEST_CASE("line_stats matches naive oracle on 1000 random samples") {
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<std::size_t> len(1, 4096);
    std::uniform_int_distribution<int> val(0, 255);
    for (int i = 0; i < 1000; ++i) {
        std::vector<std::uint8_t> v(len(rng));
        for (auto& x : v) x = static_cast<std::uint8_t>(val(rng));
        const auto naive = testutil::naive_stats(v);
        const auto st = line_stats(sample_of(v));
        CHECK(close_rel(st.mean, naive.mean));
        CHECK(close_rel(st.variance, naive.variance));
        CHECK(close_rel(st.sigma, naive.sigma));
        CHECK(close_rel(st.variance, st.sigma * st.sigma));
    }
}

TEST_CASE("spread is insensitive to constant shifts") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> val(40, 160); // headroom for the shift
    for (int i = 0; i < 100; ++i) {
        std::vector<std::uint8_t> v(128), shifted(128);
        const int c = static_cast<int>(rng() % 40);
        for (std::size_t k = 0; k < v.size(); ++k) {
            v[k] = static_cast<std::uint8_t>(val(rng));
            shifted[k] = static_cast<std::uint8_t>(v[k] + c);
        }
        const auto a = line_stats(sample_of(v));
        const auto b = line_stats(sample_of(shifted));
        CHECK(close_rel(a.sigma, b.sigma));
        CHECK(close_rel(a.variance, b.variance));
    }
}

TEST_CASE("scale law on synthetic floats") {
    // Direct check of the algebra behind line_stats with unclamped values.
    auto stats_of = [](const std::vector<double>& v) {
        double sum = 0;
        for (double x : v) sum += x;
        const double mean = sum / v.size();
        double sq = 0;
        for (double x : v) sq += (x - mean) * (x - mean);
        return std::pair{std::sqrt(sq / v.size()), sq / v.size()};
    };
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> val(0.0, 255.0);
    std::uniform_real_distribution<double> scale(0.0, 4.0);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> v(64), kv(64);
        const double k = scale(rng);
        for (std::size_t j = 0; j < v.size(); ++j) {
            v[j] = val(rng);
            kv[j] = k * v[j];
        }
        const auto [sigma, var] = stats_of(v);
        const auto [ksigma, kvar] = stats_of(kv);
        CHECK(close_rel(ksigma, k * sigma, 1e-9));
        CHECK(close_rel(kvar, k * k * var, 1e-9));
    }
}

TEST_CASE("combine_scores spot values") {
    LineStats z{};
    auto sv = combine_scores(z, z);
    CHECK(sv.a1 == 0.0);
    CHECK(sv.a1_sq == 0.0);
    CHECK(sv.a2 == 0.0);

    LineStats a{0, 3, 9, 10}, b{0, 5, 25, 10};
    sv = combine_scores(a, b);
    CHECK(sv.a1 == 4.0);
    CHECK(sv.a1_sq == 16.0);
    CHECK(sv.a2 == 17.0);

    LineStats c{0, 7, 49, 10};
    sv = combine_scores(c, c);
    CHECK(sv.a1 == 7.0);
    CHECK(sv.a1_sq == 49.0);
    CHECK(sv.a2 == 49.0); // equality case of a2 >= a1_sq
}

TEST_CASE("combine_scores identities and symmetry on random pairs") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> s(0.0, 128.0);
    for (int i = 0; i < 1000; ++i) {
        const double s1 = s(rng), s2 = s(rng);
        LineStats a{0, s1, s1 * s1, 10}, b{0, s2, s2 * s2, 10};
        const auto ab = combine_scores(a, b);
        const auto ba = combine_scores(b, a);
        CHECK(close_rel(ab.a1, (s1 + s2) / 2));
        CHECK(close_rel(ab.a1_sq, ab.a1 * ab.a1));
        CHECK(close_rel(ab.a2, (s1 * s1 + s2 * s2) / 2));
        CHECK(ab.a2 >= ab.a1_sq - 1e-9 * std::max(1.0, ab.a2)); // power-mean inequality
        CHECK(ab.a1 == ba.a1);
        CHECK(ab.a1_sq == ba.a1_sq);
        CHECK(ab.a2 == ba.a2);
    }
}
