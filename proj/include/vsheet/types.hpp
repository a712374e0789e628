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

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vsheet {

using Index = Eigen::Index;

template <typename Scalar>
using Point = Eigen::Matrix<Scalar, 2, 1>;

/// Points stored column-wise: column j is node j.
template <typename Scalar>
using Points = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Point2 = Point<double>;
using Points2 = Points<double>;
using VectorXd = Eigen::VectorXd;
using Matrix2d = Eigen::Matrix2d;

inline constexpr double kPi = 3.14159265358979323846;

enum class ParamKind { lagrangian, arclength, circulation, graph };

/// `closed` and `periodic` sheets repeat their first node as the last one;
/// for `periodic` the repeat is shifted by one period along x.
enum class Topology { open, closed, periodic };

enum class ErrorKind {
    invalid_state,
    degenerate_segment,
    singular_kernel,
    grid_mismatch,
    self_intersection,
    cfl_violation,
    unsupported,
    support,
    format,
    config,
    non_convergence,
};

std::string_view to_string(ErrorKind kind);
std::string_view to_string(ParamKind kind);
std::string_view to_string(Topology kind);
ParamKind param_kind_from_string(std::string_view name);
Topology topology_from_string(std::string_view name);

class SheetError : public std::runtime_error {
public:
    SheetError(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// One time slice of a vortex sheet.
///
/// `sigma` is the circulation density with respect to `eta`, so the vorticity
/// measure is sigma(eta) d(eta). With param_kind == arclength, sigma is the
/// usual arclength density gamma.
template <typename Scalar>
struct BasicSheetState {
    Scalar t{0};
    Vector<Scalar> eta;
    Points<Scalar> xi;
    Vector<Scalar> sigma;
    ParamKind param_kind{ParamKind::lagrangian};
    Topology topology{Topology::open};

    Index size() const { return eta.size(); }

    bool wraps() const { return topology != Topology::open; }

    /// Nodes that are not a repeat of node 0.
    Index distinct_nodes() const { return wraps() ? size() - 1 : size(); }

    /// Translation mapping the first node onto the last one. Zero unless periodic.
    Point<Scalar> period_shift() const {
        if (topology != Topology::periodic) return Point<Scalar>::Zero();
        return xi.col(size() - 1) - xi.col(0);
    }

    Scalar eta_period() const { return eta(size() - 1) - eta(0); }
};

using SheetState = BasicSheetState<double>;

struct SheetTrajectory {
    std::vector<SheetState> states;

    std::size_t size() const { return states.size(); }
    bool empty() const { return states.empty(); }
    const SheetState& front() const { return states.front(); }
    const SheetState& back() const { return states.back(); }
    VectorXd times() const;
};

}  // namespace vsheet
