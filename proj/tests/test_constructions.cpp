#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "zpcover/constructions.hpp"

using namespace zpcover;

TEST_CASE("base_p_family shape and coverage") {
    SECTION("(3, 9): ell = 6 and Z_3-covering") {
        const auto f = base_p_family(PrimeModulus(3), 9);
        CHECK(f.length() == 6);
        CHECK(f.size() == 9);
        CHECK(is_covering(f, CoverSet::all(3)).is_covering);
    }
    SECTION("N = 1 gives the single zero vector of length p") {
        const auto f = base_p_family(PrimeModulus(5), 1);
        CHECK(f.size() == 1);
        CHECK(f.length() == 5);
        for (Entry e : f.row(0)) CHECK(e == 0);
    }
    SECTION("exhaustive suite p in {3,5,7}, N in 2..p^2") {
        for (int p : {3, 5, 7}) {
            for (long long n = 2; n <= static_cast<long long>(p) * p; ++n) {
                const auto f = base_p_family(PrimeModulus(p), n);
                const auto rep = is_covering(f, CoverSet::all(p));
                INFO("p=" << p << " N=" << n);
                REQUIRE(rep.is_covering);
            }
        }
    }
    SECTION("block p is identically zero") {
        const auto f = base_p_family(PrimeModulus(3), 9);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const auto r = f.row(i);
            CHECK(r[4] == 0);  // third block (b = 3 = p) occupies coordinates 4..5
            CHECK(r[5] == 0);
        }
    }
}

TEST_CASE("concat_boost") {
    const auto f = CoveringFamily::create(PrimeModulus(3), 2, {1, 2, 2, 1},
                                          CoverSet::of(3, {1, 2}));
    SECTION("z = 1 returns the family unchanged") {
        CHECK(concat_boost(f, 1) == f);
    }
    SECTION("|F| = 2, ell = 2, z = 2 gives size 4, length 4") {
        const auto g = concat_boost(f, 2);
        CHECK(g.size() == 4);
        CHECK(g.length() == 4);
        CHECK(is_covering(g, CoverSet::of(3, {1, 2})).is_covering);
    }
    SECTION("covering is preserved for z = 3") {
        const auto g = concat_boost(f, 3);
        CHECK(g.size() == 8);
        CHECK(is_covering(g, *g.claimed_cover()).is_covering);
    }
    SECTION("budget guard") {
        const std::size_t saved = memory_budget();
        memory_budget() = 1 << 10;
        CHECK_THROWS_AS(concat_boost(f, 12), BudgetError);
        memory_budget() = saved;
    }
}

TEST_CASE("scale_boost") {
    // ordered-covering input: the pair must realize both 1 and 6 in both orders
    const auto f = CoveringFamily::create(PrimeModulus(7), 2, {0, 1, 1, 0},
                                          CoverSet::of(7, {1, 6}));
    REQUIRE(is_covering(f, CoverSet::of(7, {1, 6})).is_covering);
    SECTION("s = 1 re-covers S") {
        const auto g = scale_boost(f, 1);
        CHECK(g.length() == 4);
        CHECK(*g.claimed_cover() == CoverSet::of(7, {1, 6}));
        CHECK(is_covering(g, *g.claimed_cover()).is_covering);
    }
    SECTION("s = 2 covers S u sS") {
        const auto g = scale_boost(f, 2);
        CHECK(*g.claimed_cover() == CoverSet::of(7, {1, 2, 5, 6}));
        CHECK(is_covering(g, *g.claimed_cover()).is_covering);
    }
    SECTION("s = 0 is a domain error") {
        CHECK_THROWS_AS(scale_boost(f, 0), std::domain_error);
        CHECK_THROWS_AS(scale_boost(f, 7), std::domain_error);
    }
}

TEST_CASE("bit_lift") {
    SECTION("ell2 = 2 * ell1 * ceil(log2 k)") {
        const auto f1 = base_p_family(PrimeModulus(3), 3);  // ell1 = 3
        const auto f2 = bit_lift(f1, PrimeModulus(7));
        CHECK(f2.length() == 12);
        CHECK(f2.size() == f1.size());
        CHECK(is_covering(f2, CoverSet::range(7, 0, 2)).is_covering);
    }
    SECTION("the quoted difference pattern for u=(0,0,0) vs u'=(1,2,0)") {
        const auto f1 = base_p_family(PrimeModulus(3), 3);
        // rows: 0 -> (0,0,0), 1 -> (1,2,0), 2 -> (2,1,0)
        const auto f2 = bit_lift(f1, PrimeModulus(7));
        const auto v = f2.row(0), w = f2.row(1);
        // bit-0 copy, coordinate 0: (0+3) - 1 = 2
        CHECK((static_cast<int>(v[0]) - w[0] + 7) % 7 == 2);
        // bit-1 copy, coordinate 1: (0+3) - 2 = 1
        CHECK((static_cast<int>(v[4]) - w[4] + 7) % 7 == 1);
        // unchanged copies realize 0 at the equal coordinate
        CHECK(v[8] == w[8]);
    }
    SECTION("entries stay within [0, 2k-1]") {
        const auto f1 = base_p_family(PrimeModulus(5), 25);
        const auto f2 = bit_lift(f1, PrimeModulus(11));
        for (std::size_t i = 0; i < f2.size(); ++i)
            for (Entry e : f2.row(i)) CHECK(e <= 9);
    }
    SECTION("singleton source lifts vacuously") {
        const auto f1 = base_p_family(PrimeModulus(3), 1);
        const auto f2 = bit_lift(f1, PrimeModulus(7));
        CHECK(f2.size() == 1);
        CHECK(is_covering(f2, CoverSet::range(7, 0, 2)).is_covering);
    }
    SECTION("k too large for p") {
        const auto f1 = base_p_family(PrimeModulus(5), 5);
        CHECK_THROWS_AS(bit_lift(f1, PrimeModulus(7)), std::invalid_argument);  // 2*5 > 7
    }
    SECTION("source that is not Z_k-covering is rejected with a report") {
        const auto bad = CoveringFamily::create(PrimeModulus(3), 2, {0, 1, 0, 2});
        CHECK_THROWS_AS(bit_lift(bad, PrimeModulus(7)), VerificationError);
    }
    SECTION("minimal variant emits ceil(log2 k) + 1 copies") {
        const auto f1 = base_p_family(PrimeModulus(3), 3);
        const auto f2 = bit_lift(f1, PrimeModulus(7), true);
        CHECK(f2.length() == 3 * (2 + 1));
        CHECK(is_covering(f2, CoverSet::range(7, 0, 2)).is_covering);
    }
    SECTION("postcondition on the acceptance (k, p) grid") {
        for (auto [k, p] : std::vector<std::pair<int, int>>{{2, 5}, {2, 7}, {3, 7}, {3, 11},
                                                            {5, 11}}) {
            const auto f1 = base_p_family(PrimeModulus(k), static_cast<long long>(k) * k);
            const auto f2 = bit_lift(f1, PrimeModulus(p));
            INFO("k=" << k << " p=" << p);
            CHECK(f2.length() == 2 * f1.length() * ceil_log2(k));
            REQUIRE(is_covering(f2, CoverSet::range(p, 0, k - 1)).is_covering);
        }
    }
}

TEST_CASE("find_scaling_set") {
    SECTION("(7, 4): the sampled bound holds and {2, 5} validates independently") {
        const auto s = find_scaling_set(PrimeModulus(7), 4, 1);
        CHECK(scaling_set_covers(7, 4, s.elements));
        CHECK(oracles::scaling_oracle(7, 4, s.elements));
        CHECK(s.sampled_bound == 5);  // ceil(7 ln 7 / 3)
        if (!s.greedy_fallback)
            CHECK(static_cast<long long>(s.elements.size()) <= s.sampled_bound);
        CHECK(oracles::scaling_oracle(7, 4, {2, 5}));
    }
    SECTION("k = p: the singleton {1} suffices") {
        CHECK(oracles::scaling_oracle(7, 7, {1}));
        const auto s = find_scaling_set(PrimeModulus(7), 7, 3);
        CHECK(oracles::scaling_oracle(7, 7, s.elements));
    }
    SECTION("(7, 2): every valid set needs at least 6 elements") {
        const auto s = find_scaling_set(PrimeModulus(7), 2, 5);
        CHECK(oracles::scaling_oracle(7, 2, s.elements));
        CHECK(s.elements.size() >= 6);
        CHECK(s.sampled_bound == 14);  // ceil(7 ln 7 / 1)
        // brute force: no 5-element subset of Z_7 works for k = 2
        for (std::uint32_t mask = 0; mask < (1u << 7); ++mask) {
            if (__builtin_popcount(mask) > 5) continue;
            std::vector<int> cand;
            for (int j = 0; j < 7; ++j)
                if ((mask >> j) & 1) cand.push_back(j);
            CHECK_FALSE(oracles::scaling_oracle(7, 2, cand));
        }
    }
    SECTION("deterministic for a fixed seed") {
        const auto a = find_scaling_set(PrimeModulus(11), 3, 99);
        const auto b = find_scaling_set(PrimeModulus(11), 3, 99);
        CHECK(a.elements == b.elements);
        CHECK(a.greedy_fallback == b.greedy_fallback);
    }
    SECTION("greedy fallback (0 sampling attempts) still lands") {
        const auto s = find_scaling_set(PrimeModulus(13), 3, 1, 0);
        CHECK(s.greedy_fallback);
        CHECK(oracles::scaling_oracle(13, 3, s.elements));
    }
    SECTION("random (p, k) grid always passes the oracle") {
        for (int p : {5, 7, 11, 13, 17}) {
            for (int k = 2; k <= p; ++k) {
                const auto s = find_scaling_set(PrimeModulus(p), k, 7);
                INFO("p=" << p << " k=" << k);
                CHECK(oracles::scaling_oracle(p, k, s.elements));
                if (!s.greedy_fallback)
                    CHECK(static_cast<long long>(s.elements.size()) <= s.sampled_bound);
            }
        }
    }
    SECTION("precondition") {
        CHECK_THROWS_AS(find_scaling_set(PrimeModulus(7), 1, 0), std::invalid_argument);
        CHECK_THROWS_AS(find_scaling_set(PrimeModulus(7), 8, 0), std::invalid_argument);
    }
}

TEST_CASE("scale_cover_boost") {
    SECTION("the (7, 4) scaling set on a [0,3]-covering length-12 family") {
        // A Z_7-covering family is in particular [0,3]-covering; pad base-p
        // to length 12 so the output has the reference length 24.
        const auto base = append_zeros(base_p_family(PrimeModulus(7), 2), 5);
        REQUIRE(base.length() == 12);
        REQUIRE(is_covering(base, CoverSet::range(7, 0, 3)).is_covering);
        ScalingSet s{7, 4, {2, 5}, false, 5};
        const auto out = scale_cover_boost(base, s);
        CHECK(out.length() == 24);
        CHECK(out.size() == base.size());
        CHECK(is_covering(out, CoverSet::all(7)).is_covering);
    }
    SECTION("|S| = 1 with s = 1 keeps a Z_p-covering family covering") {
        const auto f = base_p_family(PrimeModulus(5), 5);
        ScalingSet s{5, 5, {1}, false, 4};
        const auto out = scale_cover_boost(f, s);
        CHECK(out.size() == f.size());
        CHECK(out.length() == f.length());
        CHECK(is_covering(out, CoverSet::all(5)).is_covering);
    }
    SECTION("precondition verification failure carries the report") {
        const auto f = CoveringFamily::create(PrimeModulus(7), 1, {0, 1});
        ScalingSet s{7, 4, {2, 5}, false, 5};
        CHECK_THROWS_AS(scale_cover_boost(f, s), VerificationError);
    }
}

TEST_CASE("build_upperbound_family") {
    SECTION("p=7, N=9, base_p, k=3: every stage verified, ell3 = |S| * ell2") {
        const auto res = build_upperbound_family(PrimeModulus(7), 9, PipelineBase::base_p, 42, 3);
        CHECK(res.stats.k == 3);
        CHECK(res.stats.ell1 == 6);
        CHECK(res.stats.ell2 == 24);
        CHECK(res.stats.ell3 % res.stats.ell2 == 0);
        CHECK(res.family.length() == res.stats.ell3);
        CHECK(res.family.size() == 9);
        REQUIRE(res.stats.stage_reports.size() == 3);
        for (const auto& st : res.stats.stage_reports) CHECK(st.report.is_covering);
        CHECK(is_covering(res.family, CoverSet::all(7)).is_covering);
        CHECK(res.stats.desk_scale_base);
    }
    SECTION("byte-determinism of the pipeline for a fixed seed") {
        const auto a = build_upperbound_family(PrimeModulus(7), 9, PipelineBase::base_p, 7, 3);
        const auto b = build_upperbound_family(PrimeModulus(7), 9, PipelineBase::base_p, 7, 3);
        CHECK(a.family == b.family);
    }
    SECTION("N=1 passes vacuously") {
        const auto res = build_upperbound_family(PrimeModulus(7), 1, PipelineBase::base_p, 0, 3);
        CHECK(res.family.size() == 1);
        CHECK(is_covering(res.family, CoverSet::all(7)).is_covering);
    }
    SECTION("default k selection respects 2k <= p") {
        const auto res = build_upperbound_family(PrimeModulus(7), 9, PipelineBase::base_p, 0);
        CHECK(res.stats.k >= 2);
        CHECK(2 * res.stats.k <= 7);
        CHECK(is_covering(res.family, CoverSet::all(7)).is_covering);
    }
    SECTION("alon_alweiss base composes with the pipeline") {
        const auto res =
            build_upperbound_family(PrimeModulus(7), 9, PipelineBase::alon_alweiss, 0, 3);
        CHECK(res.family.size() >= 9);
        CHECK(is_covering(res.family, CoverSet::all(7)).is_covering);
        CHECK(res.stats.base == "alon_alweiss");
    }
    SECTION("p too small for any prime k") {
        CHECK_THROWS_AS(build_upperbound_family(PrimeModulus(3), 4, PipelineBase::base_p, 0),
                        std::invalid_argument);
    }
    SECTION("invalid explicit k") {
        CHECK_THROWS_AS(build_upperbound_family(PrimeModulus(7), 9, PipelineBase::base_p, 0, 4),
                        std::invalid_argument);
        CHECK_THROWS_AS(build_upperbound_family(PrimeModulus(7), 9, PipelineBase::base_p, 0, 5),
                        std::invalid_argument);
    }
}
