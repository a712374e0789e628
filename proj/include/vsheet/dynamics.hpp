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
#include "vsheet/types.hpp"

#include <vector>

namespace vsheet {

/// lagrangian: a == 0, sigma fixed per node. circulation: the same motion on
/// a state with sigma == 1. arclength: nodes kept equally spaced in arclength
/// by the tangential coefficient a, sigma transported in flux form.
enum class EvolutionScheme { lagrangian, arclength, circulation };

std::string_view to_string(EvolutionScheme scheme);
EvolutionScheme evolution_scheme_from_string(std::string_view name);

struct EvolutionConfig {
    EvolutionScheme scheme = EvolutionScheme::lagrangian;
    double dt = 0.01;
    double t_end = 1.0;
    QuadratureSpec quadrature;
    /// Steps between equal-chord remeshes (arclength scheme).
    int remesh_every = 10;
    /// Fourier modes of the positions with magnitude below this level are
    /// zeroed after every step (closed and periodic sheets); 0 disables.
    double fourier_filter_level = 0.0;
    /// Steps between stored states.
    int output_every = 1;
    /// Material markers tracked for sub-segment circulation.
    int markers = 0;
    /// Abort when non-adjacent segments come closer than this fraction of
    /// the shortest segment.
    double self_approach_fraction = 1e-2;
};

void check_config(const EvolutionConfig& cfg);

/// a(s) = integral from 0 to s of xi_s . U_s ds' (cumulative trapezoid), the
/// tangential coefficient that keeps |xi_s| == 1. Arclength states only; one
/// value per distinct node.
VectorXd recover_tangential_coefficient(const SheetState& state, const Points2& velocity);

/// One RK4 step of size cfg.dt. Arclength steps return eta equal to the
/// cumulative chord length; remeshing is left to simulate().
SheetState step(const SheetState& state, const EvolutionConfig& cfg);

/// Trapezoid rule of sigma over eta (one period for wrapping sheets).
double total_circulation(const SheetState& state);

/// b = xi_s^perp . (U - xi_t) per distinct node with xi_t by forward difference.
VectorXd normal_defect(const SheetState& state, const SheetState& next, const Points2& velocity);

/// Zeroes the Fourier modes of the node positions whose magnitude is below
/// `level` (closed and periodic sheets; the periodic drift is removed first).
void fourier_filter(SheetState& state, double level);

/// 0.5 * (min node spacing) / max |U - mean U|.
double suggested_dt(const SheetState& state, const QuadratureSpec& q = {});

struct SimulationResult {
    SheetTrajectory trajectory;
    /// Per stored state.
    std::vector<double> circulation;
    /// Per stored state: circulation between consecutive markers (and from the
    /// last marker back to the first for wrapping sheets).
    std::vector<VectorXd> marker_circulation;
    /// Per stored state: marker positions in the computational coordinate.
    std::vector<VectorXd> marker_positions;
    Index steps = 0;
    Index remeshes = 0;
    bool filter_used = false;
    /// Largest relative chord deviation right after a remesh.
    double remesh_chord_deviation = 0.0;
    double min_self_distance = 0.0;
};

/// Evolves from `initial` to cfg.t_end. An arclength run starting from another
/// parametrization is first resampled to equal chords with the same node count.
SimulationResult simulate(const SheetState& initial, const EvolutionConfig& cfg);

}  // namespace vsheet
