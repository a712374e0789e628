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

#include "vsheet/weak_forms.hpp"

#include "vsheet/detail/parallel.hpp"
#include "vsheet/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace vsheet {

std::string_view to_string(DiagonalRule rule) {
    switch (rule) {
        case DiagonalRule::tangent_limit: return "tangent_limit";
        case DiagonalRule::exclude: return "exclude";
    }
    return "tangent_limit";
}

DiagonalRule diagonal_rule_from_string(std::string_view name) {
    if (name == "tangent_limit") return DiagonalRule::tangent_limit;
    if (name == "exclude") return DiagonalRule::exclude;
    throw SheetError(ErrorKind::config, "unknown diagonal rule '" + std::string(name) + "'");
}

namespace {

/// One node of the sheet (or of a period copy) with its quadrature mass.
struct Sample {
    Point2 x;
    Point2 tau;
    double mass;
    Index base;
    int copy;
};

/// Period copies whose nodes can enter the disk of phi.
std::pair<int, int> copy_window(const SheetState& s, const TestFunction& phi) {
    if (s.topology != Topology::periodic) return {0, 0};
    const double period = s.period_shift().x();
    const Index m = s.distinct_nodes();
    const double lo = s.xi.row(0).head(m).minCoeff();
    const double hi = s.xi.row(0).head(m).maxCoeff();
    const double c = phi.center().x();
    const double r = phi.radius();
    return {static_cast<int>(std::ceil((c - r - hi) / period)), static_cast<int>(std::floor((c + r - lo) / period))};
}

std::vector<Sample> samples(const SheetState& s, const TestFunction& phi) {
    const Index m = s.distinct_nodes();
    const VectorXd w = parameter_weights(s);
    const Points2 tau = unit_tangents(s);
    const auto [lo, hi] = copy_window(s, phi);
    const Point2 shift = s.period_shift();
    std::vector<Sample> out;
    out.reserve(static_cast<std::size_t>(m * (hi - lo + 1)));
    for (int c = lo; c <= hi; ++c)
        for (Index j = 0; j < m; ++j)
            out.push_back({Point2(s.xi.col(j) + static_cast<double>(c) * shift), Point2(tau.col(j)),
                           s.sigma(j) * w(j), j, c});
    return out;
}

VectorXd time_weights(const SheetTrajectory& traj) {
    const auto k = static_cast<Index>(traj.states.size());
    VectorXd w = VectorXd::Zero(k);
    for (Index i = 0; i + 1 < k; ++i) {
        const double h = traj.states[static_cast<std::size_t>(i + 1)].t - traj.states[static_cast<std::size_t>(i)].t;
        w(i) += 0.5 * h;
        w(i + 1) += 0.5 * h;
    }
    return w;
}

void check_support(const SheetTrajectory& traj, const TestFunction& phi) {
    if (traj.states.empty()) throw SheetError(ErrorKind::invalid_state, "empty trajectory");
    const double t_last = traj.states.back().t;
    if (phi.profile().stop_time() > t_last + 1e-12 * std::max(1.0, std::abs(t_last))) {
        std::ostringstream os;
        os << "test function '" << phi.id() << "' is active until t = " << phi.profile().stop_time()
           << " beyond the trajectory end " << t_last;
        throw SheetError(ErrorKind::support, os.str());
    }
}

bool active(const TestFunction& phi, double t) {
    return phi.profile().value(t) != 0.0 || phi.profile().derivative(t) != 0.0;
}

/// Sets the initial term and its absolute counterpart.
void add_initial_term(const SheetState& s0, const TestFunction& phi, WeakTerms& out) {
    for (const Sample& p : samples(s0, phi)) {
        if (!phi.in_support(p.x)) continue;
        const double v = p.mass * phi.value(p.x, s0.t);
        out.initial_term += v;
        out.initial_abs += std::abs(v);
    }
}

struct StateTerms {
    double time_term = 0.0;
    double time_abs = 0.0;
    double interaction = 0.0;
};

/// Per-state time term, and the velocity term when U (distinct nodes) is given.
StateTerms state_terms(const SheetState& s, const Points2* u, const TestFunction& phi) {
    StateTerms out;
    for (const Sample& p : samples(s, phi)) {
        if (!phi.in_support(p.x)) continue;
        const double v = p.mass * phi.time_derivative(p.x, s.t);
        out.time_term += v;
        out.time_abs += std::abs(v);
        if (u != nullptr) out.interaction += p.mass * phi.gradient(p.x, s.t).dot(u->col(p.base));
    }
    return out;
}

/// V_i = sum over j != i of m_j K_L(y_i - y_j): the velocity of the whole
/// periodic sheet at node i with the node itself left out.
Points2 periodic_point_sum(const SheetState& s) {
    const Index m = s.distinct_nodes();
    const VectorXd w = parameter_weights(s);
    const double period = s.period_shift().x();
    Points2 v(2, m);
    detail::parallel_for(m, [&](std::int64_t i) {
        Point2 acc = Point2::Zero();
        for (Index j = 0; j < m; ++j) {
            if (j == i) continue;
            acc += periodic_kernel<double>(Point2(s.xi.col(i) - s.xi.col(j)), period) * (s.sigma(j) * w(j));
        }
        v.col(i) = acc;
    });
    return v;
}

/// Double sum of H_phi gamma gamma over all node pairs at one state. For
/// periodic sheets `point_sum` is periodic_point_sum(s); pairs with one node
/// outside the copies that meet the support reduce to grad phi . K.
double euler_state_interaction(const SheetState& s, const TestFunction& phi, DiagonalRule diagonal,
                               const Points2* point_sum) {
    const double t = s.t;
    if (phi.profile().value(t) == 0.0) return 0.0;
    const std::vector<Sample> all = samples(s, phi);
    std::vector<std::size_t> inside;
    std::vector<Point2> grad(all.size(), Point2::Zero());
    for (std::size_t a = 0; a < all.size(); ++a) {
        if (!phi.in_support(all[a].x)) continue;
        inside.push_back(a);
        grad[a] = phi.gradient(all[a].x, t);
    }
    std::vector<char> in(all.size(), 0);
    for (std::size_t a : inside) in[a] = 1;
    const bool periodic = s.topology == Topology::periodic;
    Points2 own;
    if (periodic && point_sum == nullptr) {
        own = periodic_point_sum(s);
        point_sum = &own;
    }

    std::vector<double> rows(inside.size(), 0.0);
    detail::parallel_for(static_cast<std::int64_t>(inside.size()), [&](std::int64_t i) {
        const std::size_t a = inside[static_cast<std::size_t>(i)];
        const Sample& pa = all[a];
        double row = 0.0;
        Point2 near = Point2::Zero();
        for (std::size_t b = 0; b < all.size(); ++b) {
            if (b == a) {
                if (diagonal == DiagonalRule::tangent_limit)
                    row += pa.mass * pa.mass * h_phi_diagonal(pa.x, pa.tau, t, phi);
                continue;
            }
            const Point2 d = pa.x - all[b].x;
            if (d.squaredNorm() == 0.0) continue;
            const Point2 k = biot_savart_kernel<double>(d);
            row += (in[b] ? 0.5 : 1.0) * (grad[a] - grad[b]).dot(k) * pa.mass * all[b].mass;
            near += k * all[b].mass;
        }
        if (periodic) row += pa.mass * grad[a].dot(Point2(point_sum->col(pa.base) - near));
        rows[static_cast<std::size_t>(i)] = row;
    });
    double acc = 0.0;
    for (double r : rows) acc += r;
    return acc;
}

}  // namespace

WeakTerms weak_br_terms(const SheetTrajectory& traj, const TestFunction& phi, const QuadratureSpec& q) {
    check_support(traj, phi);
    const VectorXd tw = time_weights(traj);
    WeakTerms out;
    add_initial_term(traj.states.front(), phi, out);
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const SheetState& s = traj.states[k];
        if (!active(phi, s.t)) continue;
        const Points2 u = sheet_velocity(s, q).u;
        const StateTerms st = state_terms(s, &u, phi);
        const double w = tw(static_cast<Index>(k));
        out.time_term += w * st.time_term;
        out.time_abs += w * st.time_abs;
        out.interaction += w * st.interaction;
    }
    return out;
}

double weak_br_residual(const SheetTrajectory& traj, const TestFunction& phi, const QuadratureSpec& q) {
    return weak_br_terms(traj, phi, q).value();
}

WeakTerms weak_euler_terms(const SheetTrajectory& traj, const TestFunction& phi, DiagonalRule diagonal) {
    check_support(traj, phi);
    const VectorXd tw = time_weights(traj);
    WeakTerms out;
    add_initial_term(traj.states.front(), phi, out);
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const SheetState& s = traj.states[k];
        if (!active(phi, s.t)) continue;
        const StateTerms st = state_terms(s, nullptr, phi);
        const double w = tw(static_cast<Index>(k));
        out.time_term += w * st.time_term;
        out.time_abs += w * st.time_abs;
        out.interaction += w * euler_state_interaction(s, phi, diagonal, nullptr);
    }
    return out;
}

double weak_euler_residual(const SheetTrajectory& traj, const TestFunction& phi, DiagonalRule diagonal) {
    return weak_euler_terms(traj, phi, diagonal).value();
}

DiagonalCheck diagonal_equivalence_check(const SheetState& state, const TestFunction& phi, double eps) {
    if (!(eps > 0.0)) throw SheetError(ErrorKind::config, "eps must be positive");
    using Long = long double;
    const std::vector<Sample> all = samples(state, phi);
    const auto n = static_cast<std::int64_t>(all.size());
    std::vector<Point2> grad(all.size());
    for (std::size_t a = 0; a < all.size(); ++a) grad[a] = phi.gradient(all[a].x, state.t);
    const Long eps2 = static_cast<Long>(eps) * static_cast<Long>(eps);
    std::vector<Long> single_rows(all.size(), 0.0L);
    std::vector<Long> double_rows(all.size(), 0.0L);
    detail::parallel_for(n, [&](std::int64_t i) {
        const auto s = static_cast<std::size_t>(i);
        const Point<Long> xs = all[s].x.cast<Long>();
        const Point<Long> gs = grad[s].cast<Long>();
        Point<Long> field = Point<Long>::Zero();
        Long dbl = 0.0L;
        for (std::size_t r = 0; r < all.size(); ++r) {
            if (r == s) continue;
            const Point<Long> d = xs - all[r].x.cast<Long>();
            if (d.squaredNorm() < eps2 || d.squaredNorm() == 0.0L) continue;
            const Point<Long> k = biot_savart_kernel<Long>(d);
            const Long mr = static_cast<Long>(all[r].mass);
            field += k * mr;
            dbl += 0.5L * (grad[r].cast<Long>() - gs).dot(Point<Long>(-k)) * mr;
        }
        const Long ms = static_cast<Long>(all[s].mass);
        single_rows[s] = gs.dot(field) * ms;
        double_rows[s] = dbl * ms;
    });
    Long single = 0.0L;
    Long dbl = 0.0L;
    for (std::size_t s = 0; s < all.size(); ++s) {
        single += single_rows[s];
        dbl += double_rows[s];
    }
    return {static_cast<double>(single), static_cast<double>(dbl)};
}

bool covers_tip(const SheetTrajectory& traj, const TestFunction& phi) {
    for (const SheetState& s : traj.states) {
        if (s.topology != Topology::open || !active(phi, s.t)) continue;
        if (phi.in_support(s.xi.col(0)) || phi.in_support(s.xi.col(s.size() - 1))) return true;
    }
    return false;
}

namespace {

Point2 length_centroid(const SheetState& s) {
    const Index segs = s.size() - 1;
    Point2 acc = Point2::Zero();
    double len = 0.0;
    for (Index j = 0; j < segs; ++j) {
        const double l = (s.xi.col(j + 1) - s.xi.col(j)).norm();
        acc += 0.5 * l * (s.xi.col(j + 1) + s.xi.col(j));
        len += l;
    }
    return len > 0.0 ? Point2(acc / len) : Point2(s.xi.col(0));
}

/// Smallest distance from p to an endpoint of an open sheet over all states.
double tip_distance(const SheetTrajectory& traj, const Point2& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const SheetState& s : traj.states) {
        if (s.topology != Topology::open) return best;
        best = std::min({best, (s.xi.col(0) - p).norm(), (s.xi.col(s.size() - 1) - p).norm()});
    }
    return best;
}

enum class Slot { tip_first, tip_last, node, off_sheet, linear };

struct Template {
    Slot slot;
    double fraction;
    int time_index;
    int profile;
    BumpKind kind;
};

}  // namespace

double measure_pairing(const SheetState& s, const TestFunction& phi) {
    const VectorXd w = parameter_weights(s);
    double sum = 0.0;
    for (Index j = 0; j < s.distinct_nodes(); ++j) sum += s.sigma(j) * w(j) * phi.spatial_value(s.xi.col(j));
    return sum;
}

std::vector<TestFunction> pairing_suite(const SheetState& reference, int n) {
    if (n < 1) throw SheetError(ErrorKind::config, "pairing suite needs n >= 1");
    const double radius = 0.5 * curve_diameter(reference);
    const Index m = reference.distinct_nodes();
    std::vector<TestFunction> suite;
    for (int k = 0; k < n; ++k) {
        const Index j = (static_cast<Index>(k) * m) / n;
        char id[16];
        std::snprintf(id, sizeof id, "p%02d", k);
        suite.emplace_back(id, BumpKind::polynomial_bump, reference.xi.col(j), radius);
    }
    return suite;
}

std::vector<TestFunction> build_test_suite(const SheetTrajectory& traj, int n) {
    if (n < 1) throw SheetError(ErrorKind::config, "suite size must be >= 1");
    if (traj.states.empty()) throw SheetError(ErrorKind::invalid_state, "empty trajectory");
    const SheetState& s0 = traj.states.front();
    const double t_end = traj.states.back().t;
    const double diameter = curve_diameter(s0);
    const std::array<TimeProfile, 3> profiles{
        TimeProfile{0.0, 0.0, 0.3 * t_end, 0.8 * t_end},
        TimeProfile{0.1 * t_end, 0.3 * t_end, 0.5 * t_end, 0.9 * t_end},
        TimeProfile{0.0, 0.0, 0.5 * t_end, t_end},
    };
    std::vector<TestFunction> out;
    if (n == 1) {
        out.emplace_back("f00-centroid", BumpKind::gaussian_bump_truncated, length_centroid(s0), 0.25 * diameter,
                         profiles[2]);
        return out;
    }

    const bool open = s0.topology == Topology::open;
    std::vector<Template> cycle;
    if (open) {
        cycle = {{Slot::tip_first, 0.0, 0, 0, BumpKind::gaussian_bump_truncated},
                 {Slot::tip_last, 1.0, 0, 0, BumpKind::polynomial_bump},
                 {Slot::node, 0.5, 0, 0, BumpKind::gaussian_bump_truncated},
                 {Slot::node, 0.35, 1, 1, BumpKind::polynomial_bump},
                 {Slot::off_sheet, 0.6, 0, 2, BumpKind::gaussian_bump_truncated},
                 {Slot::linear, 0.5, 0, 0, BumpKind::linear_core},
                 {Slot::node, 0.65, 2, 2, BumpKind::gaussian_bump_truncated},
                 {Slot::off_sheet, 0.4, 1, 0, BumpKind::polynomial_bump},
                 {Slot::linear, 0.4, 2, 1, BumpKind::linear_core},
                 {Slot::tip_first, 0.0, 0, 1, BumpKind::polynomial_bump},
                 {Slot::tip_last, 1.0, 0, 2, BumpKind::gaussian_bump_truncated},
                 {Slot::node, 0.55, 1, 1, BumpKind::gaussian_bump_truncated}};
    } else {
        cycle = {{Slot::node, 0.5, 0, 0, BumpKind::gaussian_bump_truncated},
                 {Slot::node, 0.2, 1, 1, BumpKind::polynomial_bump},
                 {Slot::off_sheet, 0.7, 0, 2, BumpKind::gaussian_bump_truncated},
                 {Slot::linear, 0.35, 0, 0, BumpKind::linear_core},
                 {Slot::node, 0.85, 2, 2, BumpKind::gaussian_bump_truncated},
                 {Slot::off_sheet, 0.1, 1, 0, BumpKind::polynomial_bump},
                 {Slot::linear, 0.6, 2, 1, BumpKind::linear_core},
                 {Slot::node, 0.4, 0, 1, BumpKind::polynomial_bump},
                 {Slot::node, 0.75, 1, 0, BumpKind::gaussian_bump_truncated},
                 {Slot::off_sheet, 0.3, 2, 1, BumpKind::gaussian_bump_truncated},
                 {Slot::linear, 0.9, 1, 2, BumpKind::linear_core},
                 {Slot::node, 0.05, 2, 2, BumpKind::polynomial_bump}};
    }
    const std::array<double, 3> radius_factor{1.0, 0.7, 1.3};
    const auto last_state = static_cast<int>(traj.states.size()) - 1;
    const double base_radius = 0.2 * diameter;

    for (int i = 0; i < n; ++i) {
        const Template& tpl = cycle[static_cast<std::size_t>(i) % cycle.size()];
        const int round = i / static_cast<int>(cycle.size());
        const double factor = radius_factor[static_cast<std::size_t>(round % 3)];
        const double fraction = std::fmod(tpl.fraction + 0.07 * round, 1.0);
        const TimeProfile& profile = profiles[static_cast<std::size_t>(tpl.profile)];
        const SheetState& s = traj.states[static_cast<std::size_t>(tpl.time_index * last_state / 3)];
        const Points2 tau = unit_tangents(s);
        const Index m = s.distinct_nodes();
        std::ostringstream id;
        id << 'f' << (i < 10 ? "0" : "") << i << '-';

        if (tpl.slot == Slot::tip_first || tpl.slot == Slot::tip_last) {
            const bool first = tpl.slot == Slot::tip_first;
            const Index j = first ? 0 : s0.size() - 1;
            const Point2 t = tau.col(first ? 0 : m - 1);
            const double radius = 0.25 * diameter * factor;
            const Point2 center = Point2(s0.xi.col(j)) + 0.3 * radius * Point2(-t.y(), t.x());
            id << (first ? "tip-first" : "tip-last");
            out.emplace_back(id.str(), tpl.kind, center, radius, profile);
            continue;
        }

        Index j = static_cast<Index>(std::lround(fraction * static_cast<double>(open ? m - 1 : m)));
        j = std::clamp<Index>(j, 0, m - 1);
        Point2 center = s.xi.col(j);
        double radius = base_radius * factor;
        const Point2 normal(-tau(1, j), tau(0, j));
        if (tpl.slot == Slot::off_sheet) center += 0.6 * radius * normal;
        if (open) radius = std::min(radius, 0.8 * tip_distance(traj, center));
        if (tpl.slot == Slot::off_sheet) center = Point2(s.xi.col(j)) + 0.6 * radius * normal;
        if (tpl.slot == Slot::linear) {
            id << "linear";
            const Point2 slope = Point2(1.0, 0.5).normalized();
            out.push_back(TestFunction::linear_core(id.str(), center, radius, 0.5, slope, 0.2, profile));
            continue;
        }
        id << (tpl.slot == Slot::node ? "node" : "off");
        out.emplace_back(id.str(), tpl.kind, center, radius, profile);
    }
    return out;
}

SheetTrajectory refine_trajectory(const SheetTrajectory& traj, int factor) {
    if (factor < 1) throw SheetError(ErrorKind::config, "refinement factor must be >= 1");
    if (factor == 1) return traj;
    const auto k = static_cast<Index>(traj.states.size());
    for (const SheetState& s : traj.states)
        if (s.size() != traj.states.front().size())
            throw SheetError(ErrorKind::grid_mismatch, "time refinement needs a common node count");
    std::vector<SheetState> fine;
    fine.reserve(traj.states.size());
    for (const SheetState& s : traj.states) fine.push_back(refine_state(s, factor));

    SheetTrajectory out;
    if (k == 1) {
        out.states = fine;
        return out;
    }
    for (Index i = 0; i + 1 < k; ++i) {
        out.states.push_back(fine[static_cast<std::size_t>(i)]);
        Index first = std::clamp<Index>(i - 1, 0, std::max<Index>(k - 4, 0));
        const Index width = std::min<Index>(4, k);
        for (int sub = 1; sub < factor; ++sub) {
            const double t0 = fine[static_cast<std::size_t>(i)].t;
            const double t1 = fine[static_cast<std::size_t>(i + 1)].t;
            const double t = t0 + (t1 - t0) * static_cast<double>(sub) / factor;
            SheetState s = fine[static_cast<std::size_t>(i)];
            s.t = t;
            s.eta.setZero();
            s.xi.setZero();
            s.sigma.setZero();
            for (Index a = 0; a < width; ++a) {
                double w = 1.0;
                const double ta = fine[static_cast<std::size_t>(first + a)].t;
                for (Index b = 0; b < width; ++b) {
                    if (b == a) continue;
                    const double tb = fine[static_cast<std::size_t>(first + b)].t;
                    w *= (t - tb) / (ta - tb);
                }
                const SheetState& src = fine[static_cast<std::size_t>(first + a)];
                s.eta += w * src.eta;
                s.xi += w * src.xi;
                s.sigma += w * src.sigma;
            }
            out.states.push_back(std::move(s));
        }
    }
    out.states.push_back(fine.back());
    return out;
}

Verdict decide(const std::vector<Refinement>& seq, double floor) {
    if (seq.empty()) throw SheetError(ErrorKind::invalid_state, "empty refinement sequence");
    Verdict v;
    v.floor = floor;
    const std::size_t n = seq.size();
    const double last = seq[n - 1].residual;
    v.extrapolated = last;
    if (n == 1) {
        v.converged = std::abs(last) <= floor;
        v.zero = v.converged;
        return v;
    }
    const double d2 = last - seq[n - 2].residual;
    v.converged = std::abs(d2) < 0.1 * std::abs(last) || std::abs(last) <= floor;
    if (n >= 3) {
        const double d1 = seq[n - 2].residual - seq[n - 3].residual;
        if (d2 == 0.0) {
            v.observed_order = std::numeric_limits<double>::infinity();
        } else if (d1 != 0.0) {
            v.observed_order = std::log2(std::abs(d1) / std::abs(d2));
            if (v.observed_order > 0.0) v.extrapolated = last + d2 / (std::exp2(v.observed_order) - 1.0);
        }
    }
    v.zero = std::abs(last) <= floor || (std::abs(v.extrapolated) <= floor && v.observed_order >= 1.0);
    return v;
}

std::vector<ResidualReport> residual_reports(const SheetTrajectory& traj, const std::vector<TestFunction>& suite,
                                             const ResidualOptions& options) {
    if (options.levels.empty()) throw SheetError(ErrorKind::config, "no refinement levels");
    for (std::size_t i = 1; i < options.levels.size(); ++i)
        if (options.levels[i] <= options.levels[i - 1])
            throw SheetError(ErrorKind::config, "refinement levels must increase");
    for (const TestFunction& phi : suite) check_support(traj, phi);

    std::vector<ResidualReport> reports(suite.size());
    std::vector<double> scale(suite.size(), 0.0);
    for (std::size_t f = 0; f < suite.size(); ++f) {
        reports[f].test_function_id = suite[f].id();
        reports[f].tip_covering = covers_tip(traj, suite[f]);
    }
    for (int level : options.levels) {
        const SheetTrajectory fine = refine_trajectory(traj, level);
        const VectorXd tw = time_weights(fine);
        std::vector<WeakTerms> br(suite.size());
        std::vector<WeakTerms> eu(suite.size());
        for (std::size_t f = 0; f < suite.size(); ++f) {
            add_initial_term(fine.states.front(), suite[f], br[f]);
            eu[f] = br[f];
        }
        for (std::size_t k = 0; k < fine.states.size(); ++k) {
            const SheetState& s = fine.states[k];
            const double w = tw(static_cast<Index>(k));
            bool needed = false;
            for (const TestFunction& phi : suite) needed = needed || active(phi, s.t);
            if (!needed) continue;
            const Points2 u = sheet_velocity(s, options.quadrature).u;
            Points2 point_sum;
            if (s.topology == Topology::periodic) point_sum = periodic_point_sum(s);
            for (std::size_t f = 0; f < suite.size(); ++f) {
                if (!active(suite[f], s.t)) continue;
                const StateTerms st = state_terms(s, &u, suite[f]);
                br[f].time_term += w * st.time_term;
                br[f].time_abs += w * st.time_abs;
                br[f].interaction += w * st.interaction;
                eu[f].time_term += w * st.time_term;
                eu[f].time_abs += w * st.time_abs;
                eu[f].interaction += w * euler_state_interaction(s, suite[f], options.diagonal,
                                                                   point_sum.size() > 0 ? &point_sum : nullptr);
            }
        }
        const Index resolution = fine.states.front().size();
        for (std::size_t f = 0; f < suite.size(); ++f) {
            reports[f].br_refinements.push_back({resolution, br[f].value()});
            reports[f].euler_refinements.push_back({resolution, eu[f].value()});
            scale[f] = std::max(scale[f], br[f].linear_scale());
        }
    }
    for (std::size_t f = 0; f < suite.size(); ++f) {
        ResidualReport& r = reports[f];
        const double floor = options.floor_factor * std::max(scale[f], std::numeric_limits<double>::min());
        r.br = decide(r.br_refinements, floor);
        r.euler = decide(r.euler_refinements, floor);
        r.residual_br = r.br_refinements.back().residual;
        r.residual_euler = r.euler_refinements.back().residual;
    }
    return reports;
}

}  // namespace vsheet
