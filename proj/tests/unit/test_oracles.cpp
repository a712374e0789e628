/*
 * Copyright 2026 The vsheet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "vsheet/dynamics.hpp"
#include "vsheet/geometry.hpp"
#include "vsheet/io.hpp"
#include "vsheet/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace vsheet;

TEST_CASE("wing trajectory translates rigidly") {
    const SheetTrajectory traj = prandtl_munk_trajectory(64, 1.0, 0.25);
    REQUIRE(traj.size() == 5);
    const SheetState& s0 = traj.front();
    const SheetState& s1 = traj.back();
    CHECK(s1.t == doctest::Approx(1.0));
    CHECK(s0.xi(0, 0) == -1.0);
    CHECK(s0.xi(0, 64) == 1.0);
    const VectorXd gamma = arclength_density(s0);
    for (Index j = 1; j < 64; ++j) {
        const double x = s0.xi(0, j);
        CHECK(s0.xi(1, j) == 0.0);
        CHECK(gamma(j) == doctest::Approx(x / std::sqrt(1.0 - x * x)).epsilon(1e-3));
        CHECK(s1.xi(1, j) == doctest::Approx(-0.5));
        CHECK(s1.sigma(j) == s0.sigma(j));
    }
}

TEST_CASE("wing density is in Lp for p < 2 but not p = 2") {
    const double l15a = lp_norm(prandtl_munk_state(256, 0.0), 1.5);
    const double l15b = lp_norm(prandtl_munk_state(4096, 0.0), 1.5);
    CHECK(std::abs(l15b - l15a) <= 0.05 * l15a);
    const double l2a = lp_norm(prandtl_munk_state(128, 0.0), 2.0);
    const double l2b = lp_norm(prandtl_munk_state(1024, 0.0), 2.0);
    const double l2c = lp_norm(prandtl_munk_state(8192, 0.0), 2.0);
    // Squared norm grows by a fixed amount per doubling (logarithmic divergence).
    const double step1 = (l2b * l2b - l2a * l2a) / 3.0;
    const double step2 = (l2c * l2c - l2b * l2b) / 3.0;
    CHECK(step1 > 0.5);
    CHECK(step2 == doctest::Approx(step1).epsilon(0.05));
    CHECK(lp_norm(prandtl_munk_state(256, 0.0), 1.0) == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("flat uniform sheet: zero velocity, side velocities, stationarity") {
    const SheetState s = flat_uniform_state(128, 1.0, 2.0);
    CHECK(sheet_velocity(s).u.cwiseAbs().maxCoeff() <= 1e-13);
    for (double h : {0.1, 0.3}) {
        const Point2 up = velocity_off_sheet(s, Point2(0.3, h)).u;
        const Point2 dn = velocity_off_sheet(s, Point2(0.3, -h)).u;
        CHECK(up.x() == doctest::Approx(-1.0).epsilon(1e-6));
        CHECK(dn.x() == doctest::Approx(1.0).epsilon(1e-6));
    }
    EvolutionConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 1.0;
    cfg.fourier_filter_level = 1e-12;
    const SimulationResult r = simulate(s, cfg);
    CHECK(r.steps == 100);
    CHECK((r.trajectory.back().xi - s.xi).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("linearized growth rate is linear in wavenumber and density") {
    OracleSpec spec;
    spec.kind = OracleKind::periodic_perturbed;
    spec.n = 64;
    spec.amplitude = 1e-6;
    const double r1 = kh_linearized_growth(spec).rate;
    CHECK(r1 > 0.0);
    for (int k : {2, 4}) {
        spec.wavenumber = k;
        CHECK(kh_linearized_growth(spec).rate == doctest::Approx(k * r1).epsilon(1e-3));
    }
    spec.wavenumber = 1;
    spec.gamma = 3.0;
    CHECK(kh_linearized_growth(spec).rate == doctest::Approx(3.0 * r1).epsilon(1e-3));
    spec.amplitude = 0.0;
    CHECK(kh_linearized_growth(spec).rate == 0.0);
}

TEST_CASE("oracle states round-trip through the state format") {
    for (const SheetState& s : {prandtl_munk_state(64, 0.3), flat_uniform_state(32, 2.0, 1.5),
                                periodic_perturbed(48, 1.0, 1.0, 0.01, 2), circle_state(40, 1.3, 0.7, 0.1, 3)}) {
        const SheetState r = state_from_json(Json::parse(state_to_json(s).dump()));
        CHECK(r.t == s.t);
        CHECK(r.param_kind == s.param_kind);
        CHECK(r.topology == s.topology);
        CHECK((r.eta - s.eta).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK((r.xi - s.xi).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK((r.sigma - s.sigma).cwiseAbs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("random smooth states are reproducible and valid") {
    for (Topology t : {Topology::open, Topology::closed, Topology::periodic}) {
        const SheetState a = random_smooth_state(42, 64, t);
        const SheetState b = random_smooth_state(42, 64, t);
        validate(a);
        CHECK(a.xi == b.xi);
        CHECK(a.sigma == b.sigma);
        CHECK_FALSE(random_smooth_state(43, 64, t).xi == a.xi);
    }
}
