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

#include "vsheet/types.hpp"

namespace vsheet {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_state: return "invalid_state";
        case ErrorKind::degenerate_segment: return "degenerate_segment";
        case ErrorKind::singular_kernel: return "singular_kernel";
        case ErrorKind::grid_mismatch: return "grid_mismatch";
        case ErrorKind::self_intersection: return "self_intersection";
        case ErrorKind::cfl_violation: return "cfl_violation";
        case ErrorKind::unsupported: return "unsupported";
        case ErrorKind::support: return "support";
        case ErrorKind::format: return "format";
        case ErrorKind::config: return "config";
        case ErrorKind::non_convergence: return "non_convergence";
    }
    return "unknown";
}

std::string_view to_string(ParamKind kind) {
    switch (kind) {
        case ParamKind::lagrangian: return "lagrangian";
        case ParamKind::arclength: return "arclength";
        case ParamKind::circulation: return "circulation";
        case ParamKind::graph: return "graph";
    }
    return "lagrangian";
}

std::string_view to_string(Topology kind) {
    switch (kind) {
        case Topology::open: return "open";
        case Topology::closed: return "closed";
        case Topology::periodic: return "periodic";
    }
    return "open";
}

ParamKind param_kind_from_string(std::string_view name) {
    if (name == "lagrangian") return ParamKind::lagrangian;
    if (name == "arclength") return ParamKind::arclength;
    if (name == "circulation") return ParamKind::circulation;
    if (name == "graph") return ParamKind::graph;
    throw SheetError(ErrorKind::format, "unknown param_kind '" + std::string(name) + "'");
}

Topology topology_from_string(std::string_view name) {
    if (name == "open") return Topology::open;
    if (name == "closed") return Topology::closed;
    if (name == "periodic") return Topology::periodic;
    throw SheetError(ErrorKind::format, "unknown topology '" + std::string(name) + "'");
}

VectorXd SheetTrajectory::times() const {
    VectorXd t(static_cast<Index>(states.size()));
    for (std::size_t k = 0; k < states.size(); ++k) t(static_cast<Index>(k)) = states[k].t;
    return t;
}

}  // namespace vsheet
