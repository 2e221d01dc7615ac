#include <cmath>

#include "doctest.h"

#include "campussim/infection.hpp"
#include "campussim/rng.hpp"

using namespace campussim;

TEST_CASE("viral ramp: linear growth saturating at the incubation period") {
    CHECK(viral_ramp(0, 7) == 0.0);
    CHECK(viral_ramp(7, 7) == 1.0);
    CHECK(viral_ramp(10, 7) == 1.0);
    CHECK(viral_ramp(3, 7) == doctest::Approx(3.0 / 7.0));
    CHECK(viral_ramp(1, 7) == doctest::Approx(1.0 / 7.0));
}

TEST_CASE("distance kernel: circular-arc decay, zero beyond the radius") {
    CHECK(distance_kernel(2.0, 2.0) == 0.0);
    CHECK(distance_kernel(3.0, 2.0) == 0.0);
    CHECK(distance_kernel(std::sqrt(3.0), 2.0) == doctest::Approx(0.5));
    CHECK(distance_kernel(0.0, 2.0) == 1.0);  // co-located agents
}

TEST_CASE("kernels match their closed forms at random points") {
    Substream rng(3, StreamId::Setup);
    for (int i = 0; i < 1000; ++i) {
        int days = static_cast<int>(rng.uniform_index(15));
        double expected_ramp = std::min(static_cast<double>(days) / 7.0, 1.0);
        CHECK(std::abs(viral_ramp(days, 7) - expected_ramp) < 1e-12);

        double d = rng.uniform(0.0, 4.0);
        double expected_kernel = d > 2.0 ? 0.0 : std::sqrt(2.0 * 2.0 - d * d) / 2.0;
        CHECK(std::abs(distance_kernel(d, 2.0) - expected_kernel) < 1e-12);
    }
}

TEST_CASE("exposure probability: mean-field average over neighbors") {
    InfectionParams params;

    SUBCASE("no neighbors means no exposure") {
        CHECK(exposure_probability({}, params) == 0.0);
    }
    SUBCASE("one saturated carrier at zero distance saturates the probability") {
        ContactSet c;
        c.neighbors.push_back({1e-9, 7});
        CHECK(exposure_probability(c, params) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("group protection scales the whole sum") {
        ContactSet c;
        c.neighbors.push_back({1e-9, 7});
        params.beta = 0.6;
        CHECK(exposure_probability(c, params) == doctest::Approx(0.4).epsilon(1e-9));
    }
    SUBCASE("healthy bystanders dilute the average") {
        ContactSet c;
        c.neighbors.push_back({1e-9, 7});
        c.neighbors.push_back({1.0, 0});
        c.neighbors.push_back({1.0, 0});
        c.neighbors.push_back({1.0, 0});
        CHECK(exposure_probability(c, params) == doctest::Approx(0.25).epsilon(1e-9));
    }
}

TEST_CASE("exposure probability is monotone in beta, distance and days") {
    InfectionParams params;
    Substream rng(17, StreamId::Setup);
    for (int trial = 0; trial < 200; ++trial) {
        ContactSet c;
        int n = 1 + static_cast<int>(rng.uniform_index(10));
        for (int k = 0; k < n; ++k) {
            c.neighbors.push_back(
                {rng.uniform(0.0, 2.0), static_cast<int>(rng.uniform_index(9))});
        }
        double base = exposure_probability(c, params);

        InfectionParams protected_params = params;
        protected_params.beta = 0.5;
        CHECK(exposure_probability(c, protected_params) <= base);

        ContactSet farther = c;
        farther.neighbors[0].distance_m = std::min(2.0, farther.neighbors[0].distance_m + 0.3);
        CHECK(exposure_probability(farther, params) <= base);

        ContactSet longer = c;
        longer.neighbors[0].days_carrying += 1;
        CHECK(exposure_probability(longer, params) >= base);
    }
}

TEST_CASE("per-neighbor form equals the grouped-by-days double sum") {
    InfectionParams params;
    Substream rng(23, StreamId::Setup);
    double max_diff = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        ContactSet c;
        int n = static_cast<int>(rng.uniform_index(21));
        for (int k = 0; k < n; ++k) {
            c.neighbors.push_back(
                {rng.uniform(0.0, 2.2), static_cast<int>(rng.uniform_index(8))});
        }
        params.beta = rng.uniform(0.0, 1.0);
        double diff = std::abs(exposure_probability(c, params) -
                               exposure_probability_grouped(c, params));
        max_diff = std::max(max_diff, diff);
    }
    CHECK(max_diff < 1e-12);
}

TEST_CASE("accumulate_slice keeps the daily maximum") {
    InfectionStatus st;
    accumulate_slice(st, 0.1);
    accumulate_slice(st, 0.4);
    accumulate_slice(st, 0.2);
    CHECK(st.p_inf_today == 0.4);

    InfectionStatus zero;
    accumulate_slice(zero, 0.0);
    CHECK(zero.p_inf_today == 0.0);

    InfectionStatus single;
    accumulate_slice(single, 0.33);
    CHECK(single.p_inf_today == 0.33);
}

TEST_CASE("resolve_day: deterministic edges") {
    InfectionParams params;

    SUBCASE("zero exposure never infects") {
        for (int day = 1; day <= 50; ++day) {
            InfectionStatus st;
            st.p_inf_today = 0.0;
            Substream rng(99, StreamId::DayResolve, 1, day);
            CHECK(!resolve_day(st, params, day, rng));
            CHECK(st.state == HealthState::Susceptible);
        }
    }
    SUBCASE("exposure one infects with certainty") {
        InfectionStatus st;
        st.p_inf_today = 1.0;
        Substream rng(99, StreamId::DayResolve, 2, 1);
        CHECK(resolve_day(st, params, 1, rng));
        CHECK(st.state == HealthState::Latent);
        CHECK(st.days_carrying == 1);
    }
    SUBCASE("the threshold forces infection even when the draw misses") {
        InfectionParams capped = params;
        capped.threshold = 0.5;
        int infected = 0;
        for (int agent = 0; agent < 200; ++agent) {
            InfectionStatus st;
            st.p_inf_today = 0.5;  // at the cap: deterministic
            Substream rng(1, StreamId::DayResolve, agent, 1);
            if (resolve_day(st, capped, 1, rng)) ++infected;
        }
        CHECK(infected == 200);
    }
}

TEST_CASE("resolve_day matches the binomial rate over many agents") {
    InfectionParams params;
    int infected = 0;
    const int n = 10000;
    for (int agent = 0; agent < n; ++agent) {
        InfectionStatus st;
        st.p_inf_today = 0.3;
        Substream rng(42, StreamId::DayResolve, agent, 1);
        if (resolve_day(st, params, 1, rng)) ++infected;
    }
    double rate = static_cast<double>(infected) / n;
    CHECK(rate == doctest::Approx(0.30).epsilon(0.05));  // 0.30 +- 0.015
    CHECK(std::abs(rate - 0.30) < 0.015);
}

TEST_CASE("state machine is one-way and saturates at diagnosis") {
    InfectionParams params;
    InfectionStatus st;
    st.state = HealthState::Latent;
    st.days_carrying = 1;
    int prev_days = st.days_carrying;
    for (int day = 1; day <= 12; ++day) {
        Substream rng(5, StreamId::DayResolve, 7, day);
        resolve_day(st, params, day, rng);
        CHECK(st.days_carrying > prev_days);
        prev_days = st.days_carrying;
        CHECK(st.state != HealthState::Susceptible);
    }
    CHECK(st.state == HealthState::Infected);
    CHECK(st.days_carrying == 13);

    // The latent -> infected transition lands exactly at the incubation period.
    InfectionStatus fresh;
    fresh.state = HealthState::Latent;
    fresh.days_carrying = 1;
    for (int day = 1;; ++day) {
        Substream rng(5, StreamId::DayResolve, 8, day);
        resolve_day(fresh, params, day, rng);
        if (fresh.state == HealthState::Infected) {
            CHECK(fresh.days_carrying == params.incubation_days);
            break;
        }
        REQUIRE(day < 20);
    }
}

TEST_CASE("asymptomatic carriers are never diagnosed") {
    InfectionParams params;
    InfectionStatus st;
    st.state = HealthState::Latent;
    st.days_carrying = 1;
    st.asymptomatic = true;
    for (int day = 1; day <= 30; ++day) {
        Substream rng(5, StreamId::DayResolve, 9, day);
        resolve_day(st, params, day, rng);
    }
    CHECK(st.state == HealthState::Latent);
    CHECK(st.days_carrying == 31);
}
