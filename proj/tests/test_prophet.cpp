#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "zpcover/prophet.hpp"

using namespace zpcover;

TEST_CASE("prophet_expected_reward") {
    SECTION("r = 1 is the Binomial mean, exactly 1") {
        for (int p : {2, 3, 5, 10})
            CHECK(prophet_expected_reward(ProphetInstance(p, 1)) == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("p=3, r=27 against the exact-fraction CDF oracle") {
        const double got = prophet_expected_reward(ProphetInstance(3, 27));
        CHECK(std::abs(got - oracles::prophet_cdf_oracle_p3(27)) < 1e-12);
        CHECK(got == Catch::Approx(2.6387).margin(5e-4));
        CHECK(got >= (1.0 - std::exp(-1.0)) * 3.0);
    }
    SECTION("nondecreasing in r") {
        double prev = 0.0;
        for (int r = 1; r <= 30; ++r) {
            const double v = prophet_expected_reward(ProphetInstance(3, r));
            CHECK(v >= prev - 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("gambler_optimal_value") {
    SECTION("p=2, r=1 is exactly 1 (enumerate four realizations)") {
        CHECK(gambler_optimal_value(ProphetInstance(2, 1)) == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("bounded by 2 everywhere") {
        for (int p : {2, 3, 5, 7})
            for (int r : {1, 2, 5, 20, 100})
                CHECK(gambler_optimal_value(ProphetInstance(p, r)) <= 2.0 + 1e-12);
    }
    SECTION("nondecreasing in r") {
        for (int p : {2, 3, 5}) {
            double prev = 0.0;
            for (int r = 1; r <= 25; ++r) {
                const double v = gambler_optimal_value(ProphetInstance(p, r));
                CHECK(v >= prev - 1e-12);
                prev = v;
            }
        }
    }
    SECTION("matches the exhaustive expectimax for all r*p <= 16") {
        for (int p = 2; p <= 8; ++p) {
            for (int r = 1; r * p <= 16; ++r) {
                const double dp = gambler_optimal_value(ProphetInstance(p, r));
                const double brute = oracles::gambler_brute(p, r);
                INFO("p=" << p << " r=" << r);
                CHECK(std::abs(dp - brute) < 1e-12);
            }
        }
    }
    SECTION("dominated by the prophet") {
        for (int p : {2, 3, 5})
            for (int r : {1, 3, 9}) {
                const ProphetInstance inst(p, r);
                CHECK(gambler_optimal_value(inst) <= prophet_expected_reward(inst) + 1e-12);
            }
    }
}

TEST_CASE("prophet exact matches brute enumeration for small instances") {
    for (int p = 2; p <= 8; ++p) {
        for (int r = 1; r * p <= 16; ++r) {
            INFO("p=" << p << " r=" << r);
            CHECK(std::abs(prophet_expected_reward(ProphetInstance(p, r)) -
                           oracles::prophet_brute(p, r)) < 1e-12);
        }
    }
}

TEST_CASE("simulate_mc") {
    const ProphetInstance inst(3, 27);
    SECTION("bit-identical for a fixed seed") {
        const auto [p1, g1] = simulate_mc(inst, 5000, 77);
        const auto [p2, g2] = simulate_mc(inst, 5000, 77);
        CHECK(p1.estimate == p2.estimate);
        CHECK(p1.ci_half_width == p2.ci_half_width);
        CHECK(g1.estimate == g2.estimate);
        CHECK(g1.ci_half_width == g2.ci_half_width);
    }
    SECTION("statistical coverage: >= 93 of 100 seeded trials inside the CI") {
        const double pe = prophet_expected_reward(inst);
        const double ge = gambler_optimal_value(inst);
        int p_hits = 0, g_hits = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const auto [pm, gm] = simulate_mc(inst, 2000, seed);
            if (std::abs(pm.estimate - pe) <= pm.ci_half_width) ++p_hits;
            if (std::abs(gm.estimate - ge) <= gm.ci_half_width) ++g_hits;
        }
        CHECK(p_hits >= 93);
        CHECK(g_hits >= 93);
    }
    SECTION("samples must be positive") {
        CHECK_THROWS_AS(simulate_mc(inst, 0, 1), std::invalid_argument);
    }
}

TEST_CASE("gap_report") {
    SECTION("(3, 27): r = p^p bounds asserted and passing") {
        const auto rep = gap_report(ProphetInstance(3, 27));
        CHECK(rep.r_is_p_pow_p);
        REQUIRE(rep.prophet_lb.has_value());
        REQUIRE(rep.ratio_lb.has_value());
        CHECK(*rep.prophet_lb == Catch::Approx((1 - std::exp(-1.0)) * 3));
        CHECK(*rep.ratio_lb == Catch::Approx((1 - std::exp(-1.0)) * 1.5));
        CHECK(rep.ratio >= 0.948);
        CHECK(rep.bounds_pass);
        CHECK(rep.ratio == Catch::Approx(rep.prophet_exact / rep.gambler_exact));
    }
    SECTION("(2, 4): r = 2^2, bound (1-1/e) asserted") {
        const auto rep = gap_report(ProphetInstance(2, 4));
        CHECK(rep.r_is_p_pow_p);
        CHECK(*rep.ratio_lb == Catch::Approx(1 - std::exp(-1.0)));
        CHECK(rep.bounds_pass);
        CHECK(rep.prophet_exact == Catch::Approx(1.6796875).margin(1e-12));
        CHECK(rep.gambler_exact == Catch::Approx(1.4375).margin(1e-12));
    }
    SECTION("(p, 1): prophet is 1, ratio is 1/gambler") {
        const auto rep = gap_report(ProphetInstance(5, 1));
        CHECK_FALSE(rep.r_is_p_pow_p);
        CHECK(rep.prophet_exact == Catch::Approx(1.0).margin(1e-12));
        CHECK(rep.ratio == Catch::Approx(1.0 / rep.gambler_exact));
    }
    SECTION("MC estimates attach when requested") {
        const auto rep = gap_report(ProphetInstance(3, 27), 2000, 5);
        REQUIRE(rep.prophet_mc.has_value());
        REQUIRE(rep.gambler_mc.has_value());
        CHECK(rep.prophet_mc->samples == 2000);
    }
    SECTION("exact budget is enforced") {
        CHECK_THROWS_AS(gap_report(ProphetInstance(1009, 100000)), BudgetError);
    }
}
