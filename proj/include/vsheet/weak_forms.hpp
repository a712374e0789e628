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

#include "vsheet/kernels.hpp"
#include "vsheet/test_function.hpp"
#include "vsheet/types.hpp"

#include <string>
#include <vector>

namespace vsheet {

/// Treatment of the r == s entries of the interaction double sum.
/// tangent_limit uses the continuous extension of H_phi along the curve;
/// exclude drops them.
enum class DiagonalRule { tangent_limit, exclude };

std::string_view to_string(DiagonalRule rule);
DiagonalRule diagonal_rule_from_string(std::string_view name);

/// Terms of a weak identity: time_term = int int gamma phi_t ds dt,
/// initial_term = int gamma_0 phi(xi_0, 0) ds, interaction = the velocity
/// (or H_phi) term. The residual is their sum.
struct WeakTerms {
    double time_term = 0.0;
    double initial_term = 0.0;
    double interaction = 0.0;

    /// Same sums with absolute integrands.
    double time_abs = 0.0;
    double initial_abs = 0.0;

    double value() const { return time_term + initial_term + interaction; }
    /// Magnitude of the terms linear in gamma.
    double linear_scale() const { return time_abs + initial_abs; }
};

/// Weak Birkhoff-Rott identity with U recomputed from every stored state.
/// Trapezoid rule in time over the stored times and in the sheet parameter.
WeakTerms weak_br_terms(const SheetTrajectory& traj, const TestFunction& phi, const QuadratureSpec& q = {});
double weak_br_residual(const SheetTrajectory& traj, const TestFunction& phi, const QuadratureSpec& q = {});

/// Weak Euler identity with the symmetrized kernel H_phi. Periodic sheets add
/// the far-field pairs outside the copies that meet the support in closed form.
WeakTerms weak_euler_terms(const SheetTrajectory& traj, const TestFunction& phi,
                           DiagonalRule diagonal = DiagonalRule::tangent_limit);
double weak_euler_residual(const SheetTrajectory& traj, const TestFunction& phi,
                           DiagonalRule diagonal = DiagonalRule::tangent_limit);

struct DiagonalCheck {
    /// Sum over s of grad phi(xi_s) . [sum over |xi_s - xi_r| >= eps of K gamma_r] gamma_s.
    double single = 0.0;
    /// Sum over the same pairs of H_phi gamma_r gamma_s.
    double double_sum = 0.0;
};

/// Both sides of the fixed-eps symmetrization identity at time state.t,
/// accumulated in extended precision. Periodic sheets use the copies that
/// meet the support of phi.
DiagonalCheck diagonal_equivalence_check(const SheetState& state, const TestFunction& phi, double eps);

/// Deterministic suite of n test functions. n == 1 gives one bump at the
/// length-weighted centroid of the initial sheet with radius diameter / 4.
/// Larger suites cycle through tip bumps (open sheets), node bumps at several
/// times, off-sheet bumps and linear-core bumps with varied radii and profiles.
std::vector<TestFunction> build_test_suite(const SheetTrajectory& traj, int n);

/// True when some stored state with phi active has an open-sheet endpoint
/// inside the support of phi.
bool covers_tip(const SheetTrajectory& traj, const TestFunction& phi);

/// Each state refined by `factor` in the parameter and factor - 1 states
/// inserted between stored times by cubic interpolation in time. Needs a
/// common node count.
SheetTrajectory refine_trajectory(const SheetTrajectory& traj, int factor);

/// Sum over distinct nodes of sigma w phi(xi), the pairing of the vorticity
/// measure with the spatial part of phi.
double measure_pairing(const SheetState& state, const TestFunction& phi);

/// n polynomial bumps of radius diameter / 2 centered at evenly spaced nodes
/// of `reference`, for comparing vorticity measures.
std::vector<TestFunction> pairing_suite(const SheetState& reference, int n);

struct Refinement {
    Index resolution = 0;
    double residual = 0.0;
};

struct ResidualOptions {
    QuadratureSpec quadrature;
    DiagonalRule diagonal = DiagonalRule::tangent_limit;
    /// Refinement factors, strictly increasing, consecutive ratio 2.
    std::vector<int> levels{1, 2, 4};
    /// Zero decision floor relative to the linear terms.
    double floor_factor = 1e-4;
};

/// Richardson decision over a refinement sequence.
struct Verdict {
    double extrapolated = 0.0;
    double observed_order = 0.0;
    double floor = 0.0;
    bool converged = false;
    bool zero = false;
};

Verdict decide(const std::vector<Refinement>& sequence, double floor);

struct ResidualReport {
    std::string test_function_id;
    double residual_br = 0.0;
    double residual_euler = 0.0;
    std::vector<Refinement> br_refinements;
    std::vector<Refinement> euler_refinements;
    Verdict br;
    Verdict euler;
    bool tip_covering = false;
};

/// Residual reports for every test function, each evaluated at all
/// refinement levels. residual_br and residual_euler hold the finest level.
std::vector<ResidualReport> residual_reports(const SheetTrajectory& traj, const std::vector<TestFunction>& suite,
                                             const ResidualOptions& options = {});

}  // namespace vsheet
