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

#pragma once

#include "vsheet/types.hpp"

#include <string>

namespace vsheet {

/// C-infinity step: 0 for tau <= 0, 1 for tau >= 1, with its first two
/// derivatives.
struct SmoothStep {
    double value;
    double d1;
    double d2;
};
SmoothStep smooth_step(double tau);

/// p(t) = rise(t) * (1 - fall(t)). A rise with rise_end <= rise_start is
/// identically one; the profile vanishes for t >= fall_end.
struct TimeProfile {
    double rise_start = 0.0;
    double rise_end = 0.0;
    double fall_start = 0.5;
    double fall_end = 1.0;

    double value(double t) const;
    double derivative(double t) const;
    double stop_time() const { return fall_end; }
};

enum class BumpKind { gaussian_bump_truncated, polynomial_bump, linear_core };

std::string_view to_string(BumpKind kind);
BumpKind bump_kind_from_string(std::string_view name);

/// phi(x, t) = p(t) g(x) with g supported in the disk |x - center| < radius.
///
/// gaussian_bump_truncated: g = exp(1 - 1/(1 - u)), u = |x - c|^2 / R^2.
/// polynomial_bump: g = (1 - u)^4.
/// linear_core: g = (offset + slope . (x - c)) chi(|x - c| / R), chi == 1 on
/// the core |x - c| <= core R and decaying smoothly to zero at R.
class TestFunction {
public:
    TestFunction() = default;
    TestFunction(std::string id, BumpKind kind, const Point2& center, double radius,
                 TimeProfile profile = {});

    static TestFunction linear_core(std::string id, const Point2& center, double radius,
                                    double core, const Point2& slope, double offset,
                                    TimeProfile profile = {});

    const std::string& id() const { return id_; }
    BumpKind kind() const { return kind_; }
    const Point2& center() const { return center_; }
    double radius() const { return radius_; }
    double core() const { return core_; }
    const Point2& slope() const { return slope_; }
    double offset() const { return offset_; }
    const TimeProfile& profile() const { return profile_; }

    bool in_support(const Point2& x) const { return (x - center_).squaredNorm() < radius_ * radius_; }

    double spatial_value(const Point2& x) const;
    Point2 spatial_gradient(const Point2& x) const;
    Matrix2d spatial_hessian(const Point2& x) const;

    double value(const Point2& x, double t) const { return profile_.value(t) * spatial_value(x); }
    Point2 gradient(const Point2& x, double t) const { return profile_.value(t) * spatial_gradient(x); }
    double time_derivative(const Point2& x, double t) const {
        return profile_.derivative(t) * spatial_value(x);
    }
    Matrix2d hessian(const Point2& x, double t) const { return profile_.value(t) * spatial_hessian(x); }

    /// Upper bound of the operator norm of the spatial Hessian times max |p|,
    /// from dense sampling with a 2% margin.
    double hessian_bound() const { return hessian_bound_; }

private:
    void init_bound();

    std::string id_;
    BumpKind kind_ = BumpKind::gaussian_bump_truncated;
    Point2 center_ = Point2::Zero();
    double radius_ = 1.0;
    double core_ = 0.5;
    Point2 slope_ = Point2::Zero();
    double offset_ = 0.0;
    TimeProfile profile_;
    double hessian_bound_ = 0.0;
};

}  // namespace vsheet
