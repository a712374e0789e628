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

#include "vsheet/geometry.hpp"
#include "vsheet/kernels.hpp"
#include "vsheet/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace vsheet;

namespace {

/// Uniform density on the segment from a to b with n cells.
SheetState flat_sheet(const Point2& a, const Point2& b, Index n, double gamma) {
    SheetState s;
    s.param_kind = ParamKind::arclength;
    s.eta = VectorXd::LinSpaced(n + 1, 0.0, (b - a).norm());
    s.xi.resize(2, n + 1);
    for (Index j = 0; j <= n; ++j) s.xi.col(j) = a + (b - a) * (static_cast<double>(j) / static_cast<double>(n));
    s.sigma = VectorXd::Constant(n + 1, gamma);
    return s;
}

}  // namespace

TEST_CASE("Biot-Savart kernel values") {
    const Point2 k1 = biot_savart_kernel(Point2(1.0, 0.0));
    CHECK(k1.x() == 0.0);
    CHECK(k1.y() == doctest::Approx(1.0 / (2.0 * kPi)));
    const Point2 k2 = biot_savart_kernel(Point2(0.0, 2.0));
    CHECK(k2.x() == doctest::Approx(-1.0 / (4.0 * kPi)));
    CHECK(k2.y() == 0.0);
    CHECK_THROWS_AS(biot_savart_kernel(Point2(0.0, 0.0)), SheetError);
}

TEST_CASE("Biot-Savart kernel is antisymmetric and divergence free") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 200; ++k) {
        const Point2 x(u(rng), u(rng));
        CHECK((biot_savart_kernel<double>(-x) + biot_savart_kernel(x)).norm() == 0.0);
        const double h = 1e-4;
        const double div = (biot_savart_kernel<double>(x + Point2(h, 0)).x() - biot_savart_kernel<double>(x - Point2(h, 0)).x() +
                            biot_savart_kernel<double>(x + Point2(0, h)).y() - biot_savart_kernel<double>(x - Point2(0, h)).y()) /
                           (2.0 * h);
        CHECK(std::abs(div) <= 1e-6 / std::pow(x.norm(), 4));
    }
}

TEST_CASE("periodic kernel matches the lattice sum") {
    const Point2 x(0.23, -0.17);
    Point2 sum = biot_savart_kernel(x);
    for (int m = 1; m <= 20000; ++m)
        sum += biot_savart_kernel<double>(x + Point2(m, 0.0)) + biot_savart_kernel<double>(x - Point2(m, 0.0));
    CHECK((periodic_kernel(x, 1.0) - sum).norm() <= 1e-5);
    CHECK(periodic_remainder(Point2(1e-9, 0.0), 1.0).norm() <= 1e-8);
}

TEST_CASE("H_phi vanishes for linear phi and is symmetric") {
    const TestFunction lin = TestFunction::linear_core("lin", Point2::Zero(), 4.0, 0.9, Point2(0.3, -0.7), 0.2);
    const TestFunction bump("b", BumpKind::gaussian_bump_truncated, Point2(0.1, 0.2), 1.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    double worst_ratio = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const Point2 x(u(rng), u(rng));
        const Point2 y(u(rng), u(rng));
        CHECK(std::abs(*h_phi(x, y, 0.0, lin)) <= 1e-14 / (x - y).norm());
        const double a = *h_phi(x, y, 0.0, bump);
        CHECK(a == *h_phi(y, x, 0.0, bump));
        worst_ratio = std::max(worst_ratio, std::abs(a) / (bump.hessian_bound() / (4.0 * kPi)));
    }
    CHECK(worst_ratio <= 1.0);
    CHECK_FALSE(h_phi(Point2(0.1, 0.1), Point2(0.1, 0.1), 0.0, bump).has_value());
}

TEST_CASE("diagonal extension of H_phi is the tangent limit") {
    const TestFunction bump("b", BumpKind::polynomial_bump, Point2(0.1, 0.2), 1.0);
    const Point2 x(0.3, -0.1);
    const Point2 tau = Point2(1.0, 2.0).normalized();
    const double limit = h_phi_diagonal(x, tau, 0.0, bump);
    const double near = *h_phi(x + 1e-6 * tau, x - 1e-6 * tau, 0.0, bump);
    CHECK(near == doctest::Approx(limit).epsilon(1e-6));
}

TEST_CASE("principal value on a symmetric flat sheet vanishes at its center") {
    const SheetState s = flat_sheet(Point2(-1.0, 0.0), Point2(1.0, 0.0), 64, 1.0);
    for (PvScheme scheme : {PvScheme::alternate_point, PvScheme::epsilon_cutoff}) {
        QuadratureSpec q;
        q.scheme = scheme;
        q.epsilon = 1e-3;
        CHECK(pv_velocity(s, 32, q).u.norm() <= 1e-13);
    }
}

TEST_CASE("wing velocity is (0, -1/2) at interior nodes") {
    const SheetState s = prandtl_munk_state(256, 0.0);
    const VelocityField v = sheet_velocity(s);
    double err = 0.0;
    for (Index j = 1; j < 256; ++j) err = std::max(err, (v.u.col(j) - Point2(0.0, -0.5)).norm());
    CHECK(err <= 1e-3);
    CHECK(v.extrapolated.front());
    CHECK(v.extrapolated.back());
}

TEST_CASE("distant sheet acts as a point vortex") {
    // Two sheets on one curve is not representable; compare the induced
    // off-sheet velocity with the point-vortex value instead.
    const SheetState other = flat_sheet(Point2(9.9, 0.0), Point2(10.1, 0.0), 64, 1.5);
    const Point2 expected = biot_savart_kernel<double>(Point2(0.0, 0.0) - Point2(10.0, 0.0)) * 0.3;
    const Point2 got = velocity_off_sheet(other, Point2(0.0, 0.0)).u;
    CHECK((got - expected).norm() <= 1e-4 * expected.norm());
}

TEST_CASE("off-sheet velocity of a long flat sheet") {
    const double gamma = 1.0;
    const SheetState s = flat_sheet(Point2(-200.0, 0.0), Point2(200.0, 0.0), 40000, gamma);
    const Point2 above = velocity_off_sheet(s, Point2(0.0, 0.5)).u;
    const Point2 below = velocity_off_sheet(s, Point2(0.0, -0.5)).u;
    CHECK(above.y() == doctest::Approx(0.0));
    CHECK(above.x() == doctest::Approx(-gamma / 2.0).epsilon(2e-3));
    CHECK(below.x() == doctest::Approx(gamma / 2.0).epsilon(2e-3));
    // Mean of the two sides equals the principal value at the foot point.
    const Point2 mean = 0.5 * (above + below);
    CHECK((mean - pv_velocity(s, 20000).u).norm() <= 1e-9);
}

TEST_CASE("far field of a zero-circulation sheet decays like a dipole") {
    SheetState s = flat_sheet(Point2(-1.0, 0.0), Point2(1.0, 0.0), 64, 1.0);
    for (Index j = 0; j < s.size(); ++j) s.sigma(j) = s.xi(0, j);
    const double u10 = velocity_off_sheet(s, Point2(7.0, 7.0)).u.norm();
    const double u20 = velocity_off_sheet(s, Point2(14.0, 14.0)).u.norm();
    CHECK(u10 / u20 == doctest::Approx(4.0).epsilon(0.02));
    CHECK(velocity_off_sheet(s, Point2(0.0, 1e-4)).near_singular);
}

TEST_CASE("principal value is independent of orientation") {
    const SheetState s = random_smooth_state(9, 128, Topology::open);
    SheetState r = s;
    const Index n = s.size();
    for (Index j = 0; j < n; ++j) {
        r.xi.col(j) = s.xi.col(n - 1 - j);
        r.sigma(j) = s.sigma(n - 1 - j);
        r.eta(j) = -s.eta(n - 1 - j);
    }
    QuadratureSpec q;
    q.scheme = PvScheme::epsilon_cutoff;
    q.epsilon = 1e-3;
    for (Index j = 5; j < n - 5; j += 17) CHECK((pv_velocity(s, j, q).u - pv_velocity(r, n - 1 - j, q).u).norm() <= 1e-12);
}

TEST_CASE("schemes agree on a smooth closed sheet") {
    const SheetState s = random_smooth_state(4, 256, Topology::closed);
    QuadratureSpec alt;
    alt.scheme = PvScheme::alternate_point;
    QuadratureSpec eps;
    eps.scheme = PvScheme::epsilon_cutoff;
    eps.epsilon = 1e-9;
    eps.richardson = true;
    eps.refine_factor = 2;
    QuadratureSpec blob1;
    blob1.scheme = PvScheme::blob;
    blob1.delta = 0.16;
    QuadratureSpec blob2 = blob1;
    blob2.delta = 0.08;
    const Points2 ua = sheet_velocity(s, alt).u;
    const Points2 ue = sheet_velocity(s, eps).u;
    const double d_eps = (ua - ue).colwise().norm().maxCoeff();
    const double d1 = (sheet_velocity(s, blob1).u - ua).colwise().norm().maxCoeff();
    const double d2 = (sheet_velocity(s, blob2).u - ua).colwise().norm().maxCoeff();
    CHECK(d_eps <= 1e-5);
    CHECK(d2 < d1);
    // Blob error shrinks at least linearly in delta.
    CHECK(d1 / d2 >= 1.8);
}

TEST_CASE("maximal operator dominates the principal value") {
    const SheetState s = random_smooth_state(21, 128, Topology::closed);
    const std::vector<double> eps{0.5, 0.2, 0.1, 0.05, 0.02};
    const VectorXd m = maximal_operator(s, eps);
    const VelocityField v = sheet_velocity(s);
    for (Index j = 0; j < s.distinct_nodes(); ++j) CHECK(m(j) >= v.u.col(j).norm() - 1e-12);
    const SheetState flat = flat_sheet(Point2(-1.0, 0.0), Point2(1.0, 0.0), 64, 1.0);
    CHECK(maximal_operator(flat, eps)(32) <= 1e-12);
}
