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

#include <optional>
#include <vector>

namespace vsheet {

/// Maximum tolerated deviation of |d xi| / d eta from one on arclength states.
inline constexpr double kArclengthTolerance = 1e-6;

struct ValidationTolerances {
    double arclength = kArclengthTolerance;
    double circulation = 1e-9;
    double closure = 1e-9;
};

/// Throws SheetError(invalid_state or degenerate_segment) on violation.
void validate(const SheetState& state, const ValidationTolerances& tol = {});

/// Throws unless states are time ordered from t = 0 with one topology.
void validate(const SheetTrajectory& trajectory);

/// Cumulative polyline length at every node, starting from zero.
VectorXd arclength_table(const SheetState& state);

double total_length(const SheetState& state);

/// Trapezoid weights in eta for the distinct nodes of the sheet.
VectorXd parameter_weights(const SheetState& state);

/// Local ds/d(eta) at every distinct node from the arclength table.
VectorXd arclength_speed(const SheetState& state);

/// Density with respect to arclength, gamma = sigma / (ds/d eta).
VectorXd arclength_density(const SheetState& state);

/// Unit tangent at every distinct node (fourth order differences in eta).
Points2 unit_tangents(const SheetState& state);

/// (Integral of |gamma|^p ds)^(1/p) computed in the sheet's own parameter.
double lp_norm(const SheetState& state, double p);

/// Resamples onto N_out nodes at equal chord length along the cubic
/// interpolant of the curve. The result has param_kind == arclength and
/// eta equal to cumulative chord length, so |d xi| / d eta == 1 exactly.
/// Density is remapped conservatively: total circulation is preserved to
/// round-off. `source_eta`, when given, receives the input parameter value of
/// every output node.
SheetState reparametrize_arclength(const SheetState& state, Index n_out, VectorXd* source_eta = nullptr);

/// Length of the polyline inside the closed disk, clipping every segment
/// exactly against the circle. Periodic sheets include every copy that can
/// reach the disk.
double curve_length_in_disk(const SheetState& state, const Point2& center, double radius);

/// Largest distance between two distinct nodes (one period for periodic sheets).
double curve_diameter(const SheetState& state);

double min_segment_length(const SheetState& state);

struct RegularityOptions {
    /// Radii to sample; empty selects 24 log-spaced radii from the shortest
    /// segment to the curve diameter.
    std::vector<double> radii;
    int lattice = 32;
    double inflate = 1.5;
    /// Local pattern search around the best coarse samples. Only adds samples,
    /// so the estimate can only grow.
    bool refine = true;
    int refine_candidates = 4;
};

struct RegularityReport {
    double a_estimate = 0.0;
    std::vector<double> r_grid;
    Index centers_sampled = 0;
    Point2 worst_center = Point2::Zero();
    double worst_radius = 0.0;
    double l2_gamma = 0.0;
    double l1_gamma = 0.0;
};

RegularityReport estimate_regularity_constant(const SheetState& state,
                                              const RegularityOptions& options = {});

/// Symmetric Hausdorff distance between the node sets of `a` and `b` measured
/// against the other curve refined by cubic interpolation.
double hausdorff_distance(const SheetState& a, const SheetState& b, int refine = 8);

/// Distance from p to the polyline of the state (all copies for periodic sheets).
double distance_to_curve(const SheetState& state, const Point2& p);

/// Minimum distance between non-adjacent segments. Returns +inf for fewer than
/// four segments.
double min_nonadjacent_segment_distance(const SheetState& state);

/// Resamples a state on a grid refined by `factor` in eta with cubic interpolation.
SheetState refine_state(const SheetState& state, int factor);

}  // namespace vsheet
