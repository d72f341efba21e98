#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "edarof/edarof.hpp"

using namespace edarof;

TEST_CASE("stage count follows the bandwidth-expansion band") {
    // M = max(1, ceil(1/eta - 1)); integral targets use the smaller band.
    CHECK(order_for(1.0) == 1);
    CHECK(order_for(1.5) == 1);
    CHECK(order_for(2.0) == 1);
    CHECK(order_for(2.1) == 2);
    CHECK(order_for(3.0) == 2);
    CHECK(order_for(3.1) == 3);
    CHECK(order_for(4.0) == 3);
    CHECK(order_for(4.1) == 4);
    CHECK(order_for(5.0) == 4);
}

TEST_CASE("doubling the bandwidth with one stage digitizes the whole frame") {
    const ModulationPlan p = derive_plan(2.0, 1000);
    CHECK(p.order_m == 1);
    CHECK(p.n_p == 1000);
    CHECK(p.n_r == 0);
    CHECK(p.mux_len() == 2000);
    CHECK(validate_plan(p).empty());
}

TEST_CASE("fractional target splits the frame as documented") {
    const ModulationPlan p = derive_plan(4.2, 4096);
    CHECK(p.order_m == 4);
    CHECK(p.n_p == 3277);
    CHECK(p.n_r == 819);
    CHECK(p.mux_len() == 17204);
    CHECK(p.last_stage_len() == 4 * 3277 - 3 * 4096);
    CHECK(p.kept_analog_len() == 4 * 819);
    CHECK(validate_plan(p).empty());
}

TEST_CASE("unity target is the pure analog path") {
    const ModulationPlan p = derive_plan(1.0, 4096);
    CHECK(p.order_m == 1);
    CHECK(p.n_p == 0);
    CHECK(p.n_r == 4096);
    CHECK(p.mux_len() == 4096);
    CHECK(validate_plan(p).empty());
}

TEST_CASE("multiplex length tracks the target expansion over the whole grid") {
    for (std::size_t n : {std::size_t(512), std::size_t(4096), std::size_t(65536)}) {
        for (int i = 0; i <= 40; ++i) {
            const double inv_eta = 1.0 + 0.1 * i;
            const ModulationPlan p = derive_plan(inv_eta, n);
            CHECK(p.n_p + p.n_r == n);
            CHECK(p.mux_len() == p.n_r + std::size_t(p.order_m + 1) * p.n_p);
            const double realized = double(p.mux_len()) / double(n);
            CHECK(std::abs(realized - inv_eta) <= double(p.order_m) / double(n) + 1e-12);
            CHECK(validate_plan(p).empty());
        }
    }
}

TEST_CASE("plan derivation rejects invalid targets") {
    CHECK_THROWS_AS(derive_plan(0.9, 4096), std::domain_error);
    CHECK_THROWS_AS(derive_plan(2.0, 0), std::domain_error);
    CHECK_THROWS_AS(derive_drof_plan(0, 4096), std::domain_error);
    CHECK_THROWS_AS(derive_drof_plan(2, 0), std::domain_error);
}

TEST_CASE("all-digital plans drop the analog segments entirely") {
    const ModulationPlan p = derive_drof_plan(7, 4096);
    CHECK(p.drof_mode);
    CHECK(p.order_m == 7);
    CHECK(p.n_p == 4096);
    CHECK(p.n_r == 0);
    CHECK(p.mux_len() == 7 * 4096);
    CHECK(p.last_stage_len() == 4096);
    CHECK(p.kept_analog_len() == 0);
    CHECK(validate_plan(p).empty());
}

TEST_CASE("plan validation reports violated invariants without throwing") {
    ModulationPlan p = derive_plan(2.5, 1024);
    p.n_r = 7;  // breaks n_p + n_r == frame_len
    bool partition_flagged = false;
    for (const auto& v : validate_plan(p)) partition_flagged |= v.code == "partition-sum";
    CHECK(partition_flagged);

    ModulationPlan q = derive_plan(3.5, 1024);
    q.order_m = 1;  // outside the band for inv_eta = 3.5
    q.stage_quantizers.resize(1);
    bool order_flagged = false;
    for (const auto& v : validate_plan(q)) order_flagged |= v.code == "order-bound";
    CHECK(order_flagged);

    ModulationPlan r = derive_plan(2.0, 64);
    r.alpha_a = -1.0;
    bool alpha_flagged = false;
    for (const auto& v : validate_plan(r)) alpha_flagged |= v.code == "alpha-positive";
    CHECK(alpha_flagged);
}

TEST_CASE("plans serialize and parse back unchanged") {
    QuantizerSpec profile;
    profile.mode = QuantMode::polar;
    profile.n_a = 3;
    profile.n_phi = 16;
    ModulationPlan p = derive_plan(3.7, 4096, profile, 4.0, 77);
    p.alpha_d = 1.25;
    p.alpha_a = 0.5;
    p.alpha_r = 2.0;
    p.r_b = 0.9;

    const ModulationPlan q = plan_from_kv(plan_to_kv(p));
    CHECK(q.inv_eta == p.inv_eta);
    CHECK(q.order_m == p.order_m);
    CHECK(q.frame_len == p.frame_len);
    CHECK(q.n_p == p.n_p);
    CHECK(q.n_r == p.n_r);
    CHECK(q.r_a == p.r_a);
    CHECK(q.r_b == p.r_b);
    CHECK(q.alpha_d == p.alpha_d);
    CHECK(q.alpha_a == p.alpha_a);
    CHECK(q.alpha_r == p.alpha_r);
    CHECK(q.interleaver_seed == p.interleaver_seed);
    CHECK(q.drof_mode == p.drof_mode);
    REQUIRE(q.stage_quantizers.size() == p.stage_quantizers.size());
    for (std::size_t i = 0; i < q.stage_quantizers.size(); ++i) {
        CHECK(q.stage_quantizers[i].mode == p.stage_quantizers[i].mode);
        CHECK(q.stage_quantizers[i].n_a == p.stage_quantizers[i].n_a);
        CHECK(q.stage_quantizers[i].n_phi == p.stage_quantizers[i].n_phi);
    }

    CHECK_THROWS_AS(plan_from_kv("no_such_key = 3\n"), ConfigError);
    CHECK_THROWS_AS(plan_from_kv("stage_1 = cartesian\n"), ConfigError);
    CHECK_THROWS_AS(plan_from_kv("stage_1 = hexagonal 4 8 1.0\n"), ConfigError);
}
