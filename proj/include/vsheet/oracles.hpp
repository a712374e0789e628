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

#include <Eigen/Dense>

#include <cstdint>

namespace vsheet {

enum class OracleKind { flat_uniform, prandtl_munk, periodic_perturbed };

std::string_view to_string(OracleKind kind);
OracleKind oracle_kind_from_string(std::string_view name);

struct OracleSpec {
    OracleKind kind = OracleKind::prandtl_munk;
    /// Cells for prandtl_munk (n + 1 nodes); distinct nodes for periodic kinds.
    Index n = 256;
    double length = 1.0;
    double gamma = 1.0;
    double amplitude = 0.0;
    int wavenumber = 1;
    double t_end = 1.0;
    double dt = 0.01;
};

/// Elliptically loaded wing at time t: eta_j = pi j / n, xi = (-cos eta, -t/2),
/// sigma = -cos eta, so gamma(s) = s / sqrt(1 - s^2) with s = -cos eta.
SheetState prandtl_munk_state(Index n, double t);

/// Exact translating solution on the grid t_k = k dt up to t_end.
SheetTrajectory prandtl_munk_trajectory(Index n, double t_end, double dt);

/// Flat periodic sheet of period `length`, n distinct nodes, density gamma.
SheetState flat_uniform_state(Index n, double length, double gamma);

/// Flat periodic sheet displaced by amplitude * sin(2 pi k x / length) in y.
SheetState periodic_perturbed(Index n, double length, double gamma, double amplitude, int wavenumber);

/// Straight open sheet from (0, 0) to (length, 0), n cells, uniform density.
SheetState segment_state(Index n, double length, double gamma);

/// Closed circle of the given radius, n distinct nodes at angles eta_j = 2 pi j / n,
/// sigma(eta) = gamma + amplitude * sin(mode * eta).
SheetState circle_state(Index n, double radius, double gamma, double amplitude = 0.0, int mode = 1);

/// Smooth random sheet with a smooth random density, reproducible from the seed.
/// closed: star-shaped perturbation of the unit circle; periodic: sine series
/// graph of period one; open: graph over [-1, 1]. n distinct nodes.
SheetState random_smooth_state(std::uint64_t seed, Index n, Topology topology);

/// Initial state for a spec (t = 0).
SheetState oracle_initial_state(const OracleSpec& spec);

struct GrowthResult {
    double rate = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Jacobian restricted to the four-dimensional mode subspace
    /// (x cos, x sin, y cos, y sin).
    Eigen::Matrix4d restricted = Eigen::Matrix4d::Zero();
};

/// Leading growth rate of the linearized Lagrangian sheet dynamics about the
/// flat state in the mode of the spec's wavenumber, by power iteration started
/// from the spec's perturbation. Zero amplitude gives rate 0.
GrowthResult kh_linearized_growth(const OracleSpec& spec, const QuadratureSpec& q = {});

/// Gap between the weak Euler and weak Birkhoff-Rott identities for the exact
/// wing solution: integral over t of (pi / 8) (phi_y(1, -t/2, t) - phi_y(-1, -t/2, t)).
double prandtl_munk_euler_gap(const TestFunction& phi, double t_end);

}  // namespace vsheet
