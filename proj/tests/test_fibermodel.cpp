#include <doctest.h>

#include <cmath>
#include <vector>

#include "ics/errors.hpp"
#include "ics/fibermodel.hpp"

using namespace ics;

TEST_CASE("absolute delay matches the independent oracle") {
    // 1 m at group index 1.468: 1.468 / 2.99792458e8 s = 4896.720917... ps.
    CHECK(absolute_delay(1.0, 1.468) ==
          doctest::Approx(4896.720917508872).epsilon(1e-12));
    CHECK(absolute_delay(0.0, 1.5) == 0.0);
    CHECK_THROWS_AS(absolute_delay(-1.0, 1.468), ValidationError);
    CHECK_THROWS_AS(absolute_delay(1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(absolute_delay(1.0, 0.9), ValidationError);
}

TEST_CASE("deterministic skew is antisymmetric and matches the oracle") {
    // 1 km with group indices differing by 1e-4: 333.5640951... ps.
    CHECK(deterministic_skew(1000.0, 1.4681, 1.4680) ==
          doctest::Approx(333.5640951981153).epsilon(1e-12));
    CHECK(deterministic_skew(1000.0, 1.4680, 1.4681) ==
          doctest::Approx(-333.5640951981153).epsilon(1e-12));
    CHECK(deterministic_skew(500.0, 1.468, 1.468) == 0.0);

    const FiberSpec fiber{1000.0, {1.4680, 1.4681, 1.4690, 1.4700}};
    const SkewSample s = skew_between(fiber, 3, 1);
    CHECK(s.pair.first == 3);
    CHECK(s.pair.second == 1);
    CHECK(s.skew_ps ==
          doctest::Approx(deterministic_skew(1000.0, 1.4690, 1.4680))
              .epsilon(1e-12));
    CHECK_THROWS_AS(skew_between(fiber, 0, 1), ValidationError);
    CHECK_THROWS_AS(skew_between(fiber, 1, 5), ValidationError);
}

TEST_CASE("walk ensemble without randomness is exactly zero") {
    RandomWalkParams params;
    params.step_std_ps = 0.0;
    const auto points = simulate_walk_ensemble(params, {10.0, 100.0}, 4, 50);
    REQUIRE(points.size() == 2);
    for (const auto& p : points) {
        CHECK(p.rms_ps == 0.0);
        CHECK(p.sigma_rms_ps == 0.0);
    }
}

TEST_CASE("walk ensemble reproduces the diffusive variance") {
    RandomWalkParams params;
    params.step_length_m = 0.1;
    params.step_std_ps = 0.1;
    params.seed = 42;
    const int n_trials = 4000;
    const auto points = simulate_walk_ensemble(params, {10.0}, 4, n_trials);
    REQUIRE(points.size() == 1);

    // Pairwise difference of two independent walks: variance 2 s^2 n with
    // n = 100 steps, so rms = sqrt(2). The per-trial mean square over the 6
    // pairs of 4 cores has relative sd sqrt(2/3).
    const double expected_rms = std::sqrt(2.0 * 0.1 * 0.1 * 100.0);
    const double rel_sd = std::sqrt(2.0 / 3.0) / std::sqrt(double(n_trials));
    CHECK(std::abs(points[0].rms_ps - expected_rms) <
          4.0 * expected_rms * rel_sd / 2.0);
    // Reported standard error agrees with the analytic one within 30%.
    const double expected_se = expected_rms * rel_sd / 2.0;
    CHECK(points[0].sigma_rms_ps > 0.7 * expected_se);
    CHECK(points[0].sigma_rms_ps < 1.3 * expected_se);
}

TEST_CASE("connector offsets add their variance once per connector") {
    RandomWalkParams params;
    params.step_length_m = 0.1;
    params.step_std_ps = 0.05;
    params.connector_positions_m = {1.0, 5.0};
    params.connector_offset_std_ps = 0.3;
    params.seed = 7;
    const int n_trials = 6000;
    const auto points = simulate_walk_ensemble(params, {2.0, 10.0}, 4, n_trials);
    REQUIRE(points.size() == 2);

    // At 2 m only the first connector has been passed; at 10 m both.
    auto expected = [&](double length, int connectors) {
        const double steps = length / params.step_length_m;
        return 2.0 * params.step_std_ps * params.step_std_ps * steps +
               2.0 * params.connector_offset_std_ps *
                   params.connector_offset_std_ps * connectors;
    };
    const double rel_sd = std::sqrt(2.0 / 3.0) / std::sqrt(double(n_trials));
    for (int i = 0; i < 2; ++i) {
        const double ms_expected = expected(points[i].length_m, i == 0 ? 1 : 2);
        const double rms_expected = std::sqrt(ms_expected);
        CHECK(std::abs(points[i].rms_ps - rms_expected) <
              4.0 * rms_expected * rel_sd / 2.0);
    }
}

TEST_CASE("walk ensemble is deterministic per seed and order-insensitive") {
    RandomWalkParams params;
    params.step_std_ps = 0.05;
    params.seed = 123;
    const auto a = simulate_walk_ensemble(params, {5.0, 20.0, 50.0}, 4, 200);
    const auto b = simulate_walk_ensemble(params, {5.0, 20.0, 50.0}, 4, 200);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].rms_ps == b[i].rms_ps);
        CHECK(a[i].sigma_rms_ps == b[i].sigma_rms_ps);
    }

    // Requesting the same lengths in a different order changes nothing.
    const auto shuffled = simulate_walk_ensemble(params, {50.0, 5.0, 20.0}, 4, 200);
    CHECK(shuffled[1].length_m == a[0].length_m);
    CHECK(shuffled[1].rms_ps == a[0].rms_ps);
    CHECK(shuffled[0].rms_ps == a[2].rms_ps);

    params.seed = 124;
    const auto c = simulate_walk_ensemble(params, {5.0, 20.0, 50.0}, 4, 200);
    CHECK(c[0].rms_ps != a[0].rms_ps);
}

TEST_CASE("walk ensemble validates its inputs") {
    RandomWalkParams params;
    params.step_std_ps = 0.1;
    CHECK_THROWS_AS(simulate_walk_ensemble(params, {}, 4, 100), ValidationError);
    CHECK_THROWS_AS(simulate_walk_ensemble(params, {-1.0}, 4, 100),
                    ValidationError);
    CHECK_THROWS_AS(simulate_walk_ensemble(params, {10.0}, 1, 100),
                    ValidationError);
    CHECK_THROWS_AS(simulate_walk_ensemble(params, {10.0}, 4, 0),
                    ValidationError);
    params.step_length_m = 0.0;
    CHECK_THROWS_AS(simulate_walk_ensemble(params, {10.0}, 4, 100),
                    ValidationError);
}
