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

#include "vsheet/test_function.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <utility>

namespace vsheet {

namespace {

struct Edge {
    double e;
    double d1;
    double d2;
};

// exp(-1/x) and derivatives, zero for x <= 0.
Edge edge(double x) {
    if (x <= 0.0) return {0.0, 0.0, 0.0};
    const double e = std::exp(-1.0 / x);
    const double x2 = x * x;
    return {e, e / x2, e * (1.0 / (x2 * x2) - 2.0 / (x2 * x))};
}

struct Radial {
    double g;
    double d1;
    double d2;
};

Radial radial(BumpKind kind, double u) {
    if (u >= 1.0) return {0.0, 0.0, 0.0};
    const double w = 1.0 - u;
    if (kind == BumpKind::polynomial_bump) return {w * w * w * w, -4.0 * w * w * w, 12.0 * w * w};
    const double g = std::exp(1.0 - 1.0 / w);
    const double w2 = w * w;
    return {g, -g / w2, g * (1.0 / (w2 * w2) - 2.0 / (w2 * w))};
}

}  // namespace

SmoothStep smooth_step(double tau) {
    if (tau <= 0.0) return {0.0, 0.0, 0.0};
    if (tau >= 1.0) return {1.0, 0.0, 0.0};
    const Edge f = edge(tau);
    const Edge g = edge(1.0 - tau);
    // d/d tau of g(1 - tau) flips the sign of odd derivatives.
    const double gd1 = -g.d1;
    const double gd2 = g.d2;
    const double sum = f.e + g.e;
    const double num = f.d1 * g.e - f.e * gd1;
    const double num_d = f.d2 * g.e - f.e * gd2;
    return {f.e / sum, num / (sum * sum), num_d / (sum * sum) - 2.0 * num * (f.d1 + gd1) / (sum * sum * sum)};
}

double TimeProfile::value(double t) const {
    double rise = 1.0;
    if (rise_end > rise_start) rise = smooth_step((t - rise_start) / (rise_end - rise_start)).value;
    const double fall = 1.0 - smooth_step((t - fall_start) / (fall_end - fall_start)).value;
    return rise * fall;
}

double TimeProfile::derivative(double t) const {
    double rise = 1.0;
    double rise_d = 0.0;
    if (rise_end > rise_start) {
        const double w = rise_end - rise_start;
        const SmoothStep s = smooth_step((t - rise_start) / w);
        rise = s.value;
        rise_d = s.d1 / w;
    }
    const double w = fall_end - fall_start;
    const SmoothStep f = smooth_step((t - fall_start) / w);
    return rise_d * (1.0 - f.value) - rise * f.d1 / w;
}

std::string_view to_string(BumpKind kind) {
    switch (kind) {
        case BumpKind::gaussian_bump_truncated: return "gaussian_bump_truncated";
        case BumpKind::polynomial_bump: return "polynomial_bump";
        case BumpKind::linear_core: return "linear_core";
    }
    return "gaussian_bump_truncated";
}

BumpKind bump_kind_from_string(std::string_view name) {
    if (name == "gaussian_bump_truncated") return BumpKind::gaussian_bump_truncated;
    if (name == "polynomial_bump") return BumpKind::polynomial_bump;
    if (name == "linear_core") return BumpKind::linear_core;
    throw SheetError(ErrorKind::format, "unknown test function kind '" + std::string(name) + "'");
}

TestFunction::TestFunction(std::string id, BumpKind kind, const Point2& center, double radius,
                           TimeProfile profile)
    : id_(std::move(id)), kind_(kind), center_(center), radius_(radius), profile_(profile) {
    if (!(radius > 0.0)) throw SheetError(ErrorKind::invalid_state, "test function radius must be positive");
    if (!(profile.fall_end > profile.fall_start))
        throw SheetError(ErrorKind::invalid_state, "time profile needs fall_end > fall_start");
    init_bound();
}

TestFunction TestFunction::linear_core(std::string id, const Point2& center, double radius, double core,
                                       const Point2& slope, double offset, TimeProfile profile) {
    if (!(core > 0.0 && core < 1.0)) throw SheetError(ErrorKind::invalid_state, "core fraction must lie in (0, 1)");
    TestFunction f;
    f.id_ = std::move(id);
    f.kind_ = BumpKind::linear_core;
    f.center_ = center;
    f.radius_ = radius;
    f.core_ = core;
    f.slope_ = slope;
    f.offset_ = offset;
    f.profile_ = profile;
    if (!(radius > 0.0)) throw SheetError(ErrorKind::invalid_state, "test function radius must be positive");
    f.init_bound();
    return f;
}

double TestFunction::spatial_value(const Point2& x) const {
    const Point2 d = x - center_;
    const double u = d.squaredNorm() / (radius_ * radius_);
    if (u >= 1.0) return 0.0;
    if (kind_ != BumpKind::linear_core) return radial(kind_, u).g;
    const double r = std::sqrt(u);
    const double chi = 1.0 - smooth_step((r - core_) / (1.0 - core_)).value;
    return (offset_ + slope_.dot(d)) * chi;
}

Point2 TestFunction::spatial_gradient(const Point2& x) const {
    const Point2 d = x - center_;
    const double u = d.squaredNorm() / (radius_ * radius_);
    if (u >= 1.0) return Point2::Zero();
    if (kind_ != BumpKind::linear_core) return 2.0 * radial(kind_, u).d1 * d / (radius_ * radius_);
    const double r = std::sqrt(u);
    const SmoothStep s = smooth_step((r - core_) / (1.0 - core_));
    const double chi = 1.0 - s.value;
    Point2 grad_chi = Point2::Zero();
    if (s.d1 != 0.0) grad_chi = -s.d1 / (1.0 - core_) * d / (d.norm() * radius_);
    return slope_ * chi + (offset_ + slope_.dot(d)) * grad_chi;
}

Matrix2d TestFunction::spatial_hessian(const Point2& x) const {
    const Point2 d = x - center_;
    const double r2 = radius_ * radius_;
    const double u = d.squaredNorm() / r2;
    if (u >= 1.0) return Matrix2d::Zero();
    if (kind_ != BumpKind::linear_core) {
        const Radial g = radial(kind_, u);
        return (2.0 * g.d1 * Matrix2d::Identity() + 4.0 * g.d2 * d * d.transpose() / r2) / r2;
    }
    const double r = std::sqrt(u);
    const double w = 1.0 - core_;
    const SmoothStep s = smooth_step((r - core_) / w);
    const double chi = 1.0 - s.value;
    if (s.d1 == 0.0 && s.d2 == 0.0) {
        (void)chi;
        return Matrix2d::Zero();
    }
    const Point2 e = d / d.norm();
    const double c1 = -s.d1 / w;
    const double c2 = -s.d2 / (w * w);
    const Point2 grad_chi = c1 * e / radius_;
    const Matrix2d hess_chi =
        (c2 * e * e.transpose() + c1 / r * (Matrix2d::Identity() - e * e.transpose())) / r2;
    const double lin = offset_ + slope_.dot(d);
    return slope_ * grad_chi.transpose() + grad_chi * slope_.transpose() + lin * hess_chi;
}

void TestFunction::init_bound() {
    const int n = 161;
    double best = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const Point2 x = center_ + radius_ * Point2(-1.0 + 2.0 * a / (n - 1), -1.0 + 2.0 * b / (n - 1));
            if (!in_support(x)) continue;
            const Eigen::SelfAdjointEigenSolver<Matrix2d> es(spatial_hessian(x), Eigen::EigenvaluesOnly);
            best = std::max(best, es.eigenvalues().cwiseAbs().maxCoeff());
        }
    hessian_bound_ = 1.02 * best;
}

}  // namespace vsheet
