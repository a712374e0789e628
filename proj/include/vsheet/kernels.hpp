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

#include "vsheet/test_function.hpp"
#include "vsheet/types.hpp"

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

namespace vsheet {

/// K(x) = x^perp / (2 pi |x|^2) with (x1, x2)^perp = (-x2, x1).
template <typename Scalar>
Point<Scalar> biot_savart_kernel(const Point<Scalar>& x) {
    const Scalar r2 = x.squaredNorm();
    if (r2 == Scalar(0)) throw SheetError(ErrorKind::singular_kernel, "Biot-Savart kernel evaluated at x = 0");
    const Scalar c = Scalar(1) / (Scalar(2 * kPi) * r2);
    return Point<Scalar>(-x.y() * c, x.x() * c);
}

/// Smoothed kernel x^perp / (2 pi (|x|^2 + delta^2)); zero at the origin.
template <typename Scalar>
Point<Scalar> blob_kernel(const Point<Scalar>& x, Scalar delta) {
    const Scalar c = Scalar(1) / (Scalar(2 * kPi) * (x.squaredNorm() + delta * delta));
    return Point<Scalar>(-x.y() * c, x.x() * c);
}

/// Sum of K over the lattice x + n (period, 0), n in Z (symmetric summation).
/// `delta` > 0 gives the matching blob regularization.
template <typename Scalar>
Point<Scalar> periodic_kernel(const Point<Scalar>& x, Scalar period, Scalar delta = Scalar(0)) {
    using std::cos;
    using std::cosh;
    using std::sin;
    using std::sinh;
    const Scalar a = Scalar(kPi) * x.x() / period;
    const Scalar b = Scalar(kPi) * x.y() / period;
    if (std::abs(2 * b) > Scalar(700)) {
        return Point<Scalar>(-(b > 0 ? Scalar(1) : Scalar(-1)) / (2 * period), Scalar(0));
    }
    const Scalar sa = sin(a);
    const Scalar ca = cos(a);
    const Scalar sb = sinh(b);
    const Scalar cb = cosh(b);
    const Scalar reg = Scalar(kPi) * delta / period;
    const Scalar d = 2 * (sb * sb + sa * sa) + 2 * reg * reg;
    if (d == Scalar(0)) throw SheetError(ErrorKind::singular_kernel, "periodic kernel evaluated on the lattice");
    const Scalar c = Scalar(1) / (period * d);
    return Point<Scalar>(-sb * cb * c, sa * ca * c);
}

/// periodic_kernel(x) - biot_savart_kernel(x): smooth near the origin and zero there.
Point2 periodic_remainder(const Point2& x, double period);

/// Desingularization scheme of the principal-value integral.
enum class PvScheme { automatic, epsilon_cutoff, alternate_point, blob };

std::string_view to_string(PvScheme scheme);
PvScheme pv_scheme_from_string(std::string_view name);

struct QuadratureSpec {
    PvScheme scheme = PvScheme::automatic;
    /// Ambient-distance cutoff for epsilon_cutoff.
    double epsilon = 1e-9;
    double delta = 0.05;
    /// Subcells per cell for epsilon_cutoff.
    int refine_factor = 1;
    /// Richardson extrapolation over refine_factor, 2x and 4x (epsilon_cutoff).
    bool richardson = false;
};

/// automatic resolves to alternate_point: odd index offsets with doubled
/// trapezoid weights, which uses nodal data only.
PvScheme resolve_scheme(const QuadratureSpec& q, const SheetState& state);

void check_quadrature(const QuadratureSpec& q, const SheetState& state);

struct VelocityField {
    /// One column per node (wrap node included).
    Points2 u;
    /// Endpoint values of open sheets obtained by extrapolation.
    std::vector<bool> extrapolated;
    /// Some node is closer to a non-adjacent part of the curve than the
    /// quadrature can resolve.
    bool self_approach = false;
};

/// Mean (principal-value) velocity at every node.
VelocityField sheet_velocity(const SheetState& state, const QuadratureSpec& q = {});

struct PvResult {
    Point2 u = Point2::Zero();
    bool extrapolated = false;
    bool self_approach = false;
};

PvResult pv_velocity(const SheetState& state, Index node, const QuadratureSpec& q = {});

struct OffSheetVelocity {
    Point2 u = Point2::Zero();
    bool near_singular = false;
};

/// Trapezoid rule for the Biot-Savart integral at a point off the sheet.
OffSheetVelocity velocity_off_sheet(const SheetState& state, const Point2& x);

/// Per distinct node: max over eps of the magnitude of the truncated integral
/// over |xi(s) - xi(s')| >= eps, together with |pv velocity| as the eps -> 0
/// member. Quadrature samples follow the epsilon_cutoff layout.
VectorXd maximal_operator(const SheetState& state, const std::vector<double>& eps_grid,
                          const QuadratureSpec& q = {});

/// H_phi(x, y, t) = (grad phi(x, t) - grad phi(y, t)) / 2 . K(x - y).
/// Empty on the diagonal x == y.
std::optional<double> h_phi(const Point2& x, const Point2& y, double t, const TestFunction& phi);

/// Continuous extension of H_phi to x == y approached along unit tangent tau.
double h_phi_diagonal(const Point2& x, const Point2& tau, double t, const TestFunction& phi);

}  // namespace vsheet
