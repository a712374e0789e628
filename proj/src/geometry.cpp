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

#include "vsheet/geometry.hpp"

#include "vsheet/detail/circulation.hpp"
#include "vsheet/detail/nodes.hpp"
#include "vsheet/detail/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace vsheet {

using detail::NodeView;

namespace {

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw SheetError(kind, msg); }

/// Derivative at x of the Lagrange interpolant through (nodes, values).
template <std::size_t K>
double lagrange_derivative(const std::array<double, K>& nodes, const std::array<double, K>& values,
                           double x) {
    double d = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        double li = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            if (k == i) continue;
            double term = 1.0 / (nodes[i] - nodes[k]);
            for (std::size_t m = 0; m < K; ++m) {
                if (m == i || m == k) continue;
                term *= (x - nodes[m]) / (nodes[i] - nodes[m]);
            }
            li += term;
        }
        d += li * values[i];
    }
    return d;
}

struct Segment {
    Point2 a;
    Point2 b;
};

/// Range of period copies of a periodic sheet that can come within `reach`
/// of the x-interval [lo, hi].
std::pair<Index, Index> copy_range(const SheetState& s, double lo, double hi, double reach) {
    if (s.topology != Topology::periodic) return {0, 0};
    const double period = s.period_shift().x();
    const double xmin = s.xi.row(0).minCoeff();
    const double xmax = s.xi.row(0).maxCoeff();
    const auto first = static_cast<Index>(std::floor((lo - reach - xmax) / period));
    const auto last = static_cast<Index>(std::ceil((hi + reach - xmin) / period));
    return {first, last};
}

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
    const Point2 d = b - a;
    const double len2 = d.squaredNorm();
    double t = len2 > 0.0 ? (p - a).dot(d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (a + t * d - p).norm();
}

double cross(const Point2& u, const Point2& v) { return u.x() * v.y() - u.y() * v.x(); }

double segment_distance(const Segment& s, const Segment& t) {
    // Proper crossing: each segment strictly straddles the other's line.
    const double o1 = cross(s.b - s.a, t.a - s.a);
    const double o2 = cross(s.b - s.a, t.b - s.a);
    const double o3 = cross(t.b - t.a, s.a - t.a);
    const double o4 = cross(t.b - t.a, s.b - t.a);
    if (((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0)))
        return 0.0;
    return std::min({point_segment_distance(s.a, t.a, t.b), point_segment_distance(s.b, t.a, t.b),
                     point_segment_distance(t.a, s.a, s.b), point_segment_distance(t.b, s.a, s.b)});
}

/// Length of segment [a, b] inside the closed disk |x - c| <= r.
double clipped_length(const Point2& a, const Point2& b, const Point2& c, double r) {
    const Point2 d = b - a;
    const Point2 f = a - c;
    const double qa = d.squaredNorm();
    if (qa == 0.0) return 0.0;
    const double qb = f.dot(d);
    const double qc = f.squaredNorm() - r * r;
    const double disc = qb * qb - qa * qc;
    if (disc <= 0.0) return 0.0;
    const double root = std::sqrt(disc);
    const double t1 = std::max((-qb - root) / qa, 0.0);
    const double t2 = std::min((-qb + root) / qa, 1.0);
    return t2 > t1 ? (t2 - t1) * std::sqrt(qa) : 0.0;
}

std::vector<Segment> segments_of(const SheetState& s) {
    std::vector<Segment> segs;
    segs.reserve(static_cast<std::size_t>(s.size() - 1));
    for (Index j = 0; j + 1 < s.size(); ++j) segs.push_back({s.xi.col(j), s.xi.col(j + 1)});
    return segs;
}

}  // namespace

void validate(const SheetState& s, const ValidationTolerances& tol) {
    const Index n = s.size();
    if (n < 3) fail(ErrorKind::invalid_state, "sheet needs at least 3 nodes");
    if (s.xi.cols() != n || s.sigma.size() != n)
        fail(ErrorKind::invalid_state, "eta, xi and sigma sizes differ");
    if (s.wraps() && n < 4) fail(ErrorKind::invalid_state, "wrapping sheet needs at least 3 distinct nodes");
    if (!s.xi.allFinite() || !s.sigma.allFinite() || !s.eta.allFinite())
        fail(ErrorKind::invalid_state, "non-finite node data");
    for (Index j = 0; j + 1 < n; ++j) {
        if (!(s.eta(j + 1) > s.eta(j))) {
            std::ostringstream os;
            os << "eta not strictly increasing at node " << j;
            fail(ErrorKind::invalid_state, os.str());
        }
        if ((s.xi.col(j + 1) - s.xi.col(j)).norm() == 0.0) {
            std::ostringstream os;
            os << "repeated node " << j;
            fail(ErrorKind::degenerate_segment, os.str());
        }
    }
    if (s.param_kind == ParamKind::arclength) {
        for (Index j = 0; j + 1 < n; ++j) {
            const double ratio = (s.xi.col(j + 1) - s.xi.col(j)).norm() / (s.eta(j + 1) - s.eta(j));
            if (std::abs(ratio - 1.0) > tol.arclength) {
                std::ostringstream os;
                os << "arclength parametrization violated at segment " << j << " (ratio " << ratio << ")";
                fail(ErrorKind::invalid_state, os.str());
            }
        }
    }
    if (s.param_kind == ParamKind::circulation) {
        if ((s.sigma.array() - 1.0).abs().maxCoeff() > tol.circulation)
            fail(ErrorKind::invalid_state, "circulation parametrization requires sigma == 1");
    }
    if (s.topology == Topology::closed) {
        const double scale = std::max(1.0, s.xi.cwiseAbs().maxCoeff());
        if ((s.xi.col(n - 1) - s.xi.col(0)).norm() > tol.closure * scale)
            fail(ErrorKind::invalid_state, "closed sheet must repeat its first node");
    }
    if (s.topology == Topology::periodic) {
        const Point2 shift = s.period_shift();
        if (!(shift.x() > 0.0) || std::abs(shift.y()) > tol.closure * shift.x())
            fail(ErrorKind::invalid_state, "periodic sheet must repeat its first node shifted along +x");
    }
    if (s.wraps()) {
        if (std::abs(s.sigma(n - 1) - s.sigma(0)) > 1e-9 * (1.0 + std::abs(s.sigma(0))))
            fail(ErrorKind::invalid_state, "wrapping sheet must repeat its first density value");
    }
}

void validate(const SheetTrajectory& traj) {
    if (traj.empty()) fail(ErrorKind::invalid_state, "empty trajectory");
    if (traj.front().t != 0.0) fail(ErrorKind::invalid_state, "trajectory must start at t = 0");
    for (std::size_t k = 0; k < traj.size(); ++k) {
        validate(traj.states[k], ValidationTolerances{1e-3, 1e-6, 1e-9});
        if (k > 0) {
            if (!(traj.states[k].t > traj.states[k - 1].t))
                fail(ErrorKind::invalid_state, "trajectory times must be strictly increasing");
            if (traj.states[k].topology != traj.states[0].topology)
                fail(ErrorKind::invalid_state, "trajectory states must share topology");
        }
    }
}

VectorXd arclength_table(const SheetState& s) {
    const Index n = s.size();
    VectorXd table(n);
    table(0) = 0.0;
    for (Index j = 1; j < n; ++j) {
        const double len = (s.xi.col(j) - s.xi.col(j - 1)).norm();
        if (len == 0.0) {
            std::ostringstream os;
            os << "degenerate segment between nodes " << j - 1 << " and " << j;
            fail(ErrorKind::degenerate_segment, os.str());
        }
        table(j) = table(j - 1) + len;
    }
    return table;
}

double total_length(const SheetState& s) { return arclength_table(s)(s.size() - 1); }

VectorXd parameter_weights(const SheetState& s) {
    const NodeView v(s);
    const Index m = v.count();
    VectorXd w(m);
    if (v.wraps()) {
        for (Index j = 0; j < m; ++j) w(j) = 0.5 * (v.eta(j + 1) - v.eta(j - 1));
        return w;
    }
    w(0) = 0.5 * (s.eta(1) - s.eta(0));
    w(m - 1) = 0.5 * (s.eta(m - 1) - s.eta(m - 2));
    for (Index j = 1; j + 1 < m; ++j) w(j) = 0.5 * (s.eta(j + 1) - s.eta(j - 1));
    return w;
}

VectorXd arclength_speed(const SheetState& s) {
    const VectorXd table = arclength_table(s);
    const Index n = s.size();
    const Index m = s.distinct_nodes();
    VectorXd speed(m);
    if (s.wraps()) {
        const double len = table(n - 1);
        for (Index j = 0; j < m; ++j) {
            const double sp = j + 1 < n ? table(j + 1) : len + table(1);
            const double sm = j > 0 ? table(j - 1) : table(n - 2) - len;
            const double ep = s.eta(j + 1);
            const double em = j > 0 ? s.eta(j - 1) : s.eta(n - 2) - s.eta_period();
            speed(j) = (sp - sm) / (ep - em);
        }
        return speed;
    }
    speed(0) = (table(1) - table(0)) / (s.eta(1) - s.eta(0));
    speed(m - 1) = (table(m - 1) - table(m - 2)) / (s.eta(m - 1) - s.eta(m - 2));
    for (Index j = 1; j + 1 < m; ++j)
        speed(j) = (table(j + 1) - table(j - 1)) / (s.eta(j + 1) - s.eta(j - 1));
    return speed;
}

VectorXd arclength_density(const SheetState& s) {
    const VectorXd speed = arclength_speed(s);
    return s.sigma.head(s.distinct_nodes()).cwiseQuotient(speed);
}

Points2 unit_tangents(const SheetState& s) {
    const NodeView v(s);
    const Index m = v.count();
    Points2 tau(2, m);
    for (Index j = 0; j < m; ++j) {
        Index first = j - 2;
        if (!v.wraps()) first = std::clamp<Index>(first, 0, std::max<Index>(m - 5, 0));
        const Index width = v.wraps() ? 5 : std::min<Index>(5, m);
        Point2 d = Point2::Zero();
        if (width == 5) {
            std::array<double, 5> nodes{};
            std::array<double, 5> xs{};
            std::array<double, 5> ys{};
            for (int i = 0; i < 5; ++i) {
                nodes[i] = v.eta(first + i);
                const Point2 p = v.xi(first + i);
                xs[i] = p.x();
                ys[i] = p.y();
            }
            d = {lagrange_derivative(nodes, xs, v.eta(j)), lagrange_derivative(nodes, ys, v.eta(j))};
            // Where the parametrization degenerates (zero speed) use the chord.
            const Index a = v.wraps() ? j - 1 : std::max<Index>(j - 1, 0);
            const Index b = v.wraps() ? j + 1 : std::min<Index>(j + 1, m - 1);
            const Point2 chord = v.xi(b) - v.xi(a);
            if (d.norm() * (v.eta(b) - v.eta(a)) < 1e-3 * chord.norm()) d = chord;
        } else {
            const Index a = std::max<Index>(j - 1, 0);
            const Index b = std::min<Index>(j + 1, m - 1);
            d = v.xi(b) - v.xi(a);
        }
        tau.col(j) = d.normalized();
    }
    return tau;
}

double lp_norm(const SheetState& s, double p) {
    const VectorXd w = parameter_weights(s);
    const VectorXd speed = arclength_speed(s);
    double acc = 0.0;
    for (Index j = 0; j < w.size(); ++j)
        acc += w(j) * std::pow(std::abs(s.sigma(j)), p) * std::pow(speed(j), 1.0 - p);
    return std::pow(acc, 1.0 / p);
}

SheetState reparametrize_arclength(const SheetState& s, Index n_out, VectorXd* source_eta) {
    if (n_out < 3) fail(ErrorKind::invalid_state, "reparametrization needs at least 3 output nodes");
    const Index n = s.size();
    const VectorXd table = arclength_table(s);
    const NodeView v(s);
    const Index segs = n_out - 1;
    const double length = table(n - 1);

    // Input arclength <-> eta, linear inside each input cell.
    auto eta_of_s = [&](double sv) {
        sv = std::clamp(sv, 0.0, length);
        const double* b = table.data();
        Index j = static_cast<Index>(std::upper_bound(b, b + n, sv) - b) - 1;
        j = std::clamp<Index>(j, 0, n - 2);
        const double a = (sv - table(j)) / (table(j + 1) - table(j));
        return s.eta(j) + a * (s.eta(j + 1) - s.eta(j));
    };
    auto s_of_eta = [&](double e) {
        const Index j = std::clamp<Index>(detail::locate_cell(v, e), 0, n - 2);
        const double a = (e - s.eta(j)) / (s.eta(j + 1) - s.eta(j));
        return table(j) + a * (table(j + 1) - table(j));
    };
    auto speed_at = [&](double e) {
        const Index j = std::clamp<Index>(detail::locate_cell(v, e), 0, n - 2);
        return (table(j + 1) - table(j)) / (s.eta(j + 1) - s.eta(j));
    };

    VectorXd e_out(n_out);
    for (Index k = 0; k < n_out; ++k) e_out(k) = eta_of_s(length * static_cast<double>(k) / segs);
    e_out(0) = s.eta(0);
    e_out(n_out - 1) = s.eta(n - 1);

    Points2 x_out(2, n_out);
    VectorXd cum(n_out);
    auto place = [&]() {
        for (Index k = 0; k < n_out; ++k) x_out.col(k) = detail::sample_at(v, e_out(k)).xi;
        if (s.wraps()) x_out.col(n_out - 1) = x_out.col(0) + s.period_shift();
        else x_out.col(n_out - 1) = s.xi.col(n - 1);
        x_out.col(0) = s.xi.col(0);
        cum(0) = 0.0;
        for (Index k = 1; k < n_out; ++k) cum(k) = cum(k - 1) + (x_out.col(k) - x_out.col(k - 1)).norm();
    };
    // Equalize chords: moving node k along the curve by d changes only the
    // cumulative chord at k, so each node is corrected independently.
    for (int iter = 0; iter < 60; ++iter) {
        place();
        const double target = cum(n_out - 1) / segs;
        double worst = 0.0;
        for (Index k = 1; k < n_out; ++k)
            worst = std::max(worst, std::abs((cum(k) - cum(k - 1)) / target - 1.0));
        if (worst < 1e-12) break;
        for (Index k = 1; k + 1 < n_out; ++k) {
            const double delta = target * static_cast<double>(k) - cum(k);
            e_out(k) += delta / speed_at(e_out(k));
        }
        for (Index k = 1; k + 1 < n_out; ++k)
            if (!(e_out(k) > e_out(k - 1))) fail(ErrorKind::degenerate_segment, "reparametrization folded");
    }
    place();

    // Conservative density remap. Faces sit halfway between output nodes in
    // input arclength; sigma_k * w_k equals the input circulation between faces.
    const detail::CumulativeCirculation circulation_to(s);

    VectorXd s_nodes(n_out);
    for (Index k = 0; k < n_out; ++k) s_nodes(k) = s_of_eta(e_out(k));
    s_nodes(n_out - 1) = length;
    VectorXd face(n_out - 1);
    for (Index k = 0; k + 1 < n_out; ++k) face(k) = eta_of_s(0.5 * (s_nodes(k) + s_nodes(k + 1)));

    if (source_eta != nullptr) *source_eta = e_out;
    SheetState out;
    out.t = s.t;
    out.topology = s.topology;
    out.param_kind = ParamKind::arclength;
    out.xi = x_out;
    out.eta = cum;
    out.sigma.resize(n_out);
    if (s.wraps()) {
        const Index m = n_out - 1;
        for (Index k = 0; k < m; ++k) {
            const double lo = k > 0 ? face(k - 1) : face(m - 1) - s.eta_period();
            const double w = k > 0 ? 0.5 * (cum(k + 1) - cum(k - 1)) : 0.5 * (cum(1) + cum(m) - cum(m - 1));
            out.sigma(k) = (circulation_to(face(k)) - circulation_to(lo)) / w;
        }
        out.sigma(m) = out.sigma(0);
    } else {
        for (Index k = 0; k < n_out; ++k) {
            const double lo = k > 0 ? face(k - 1) : s.eta(0);
            const double hi = k + 1 < n_out ? face(k) : s.eta(n - 1);
            const double w = 0.5 * (cum(std::min(k + 1, n_out - 1)) - cum(std::max<Index>(k - 1, 0)));
            out.sigma(k) = (circulation_to(hi) - circulation_to(lo)) / w;
        }
    }
    return out;
}

double curve_length_in_disk(const SheetState& s, const Point2& c, double r) {
    if (!(r > 0.0)) fail(ErrorKind::invalid_state, "disk radius must be positive");
    const auto [first, last] = copy_range(s, c.x(), c.x(), r);
    const Point2 shift = s.period_shift();
    double total = 0.0;
    for (Index k = first; k <= last; ++k) {
        const Point2 off = static_cast<double>(k) * shift;
        for (Index j = 0; j + 1 < s.size(); ++j)
            total += clipped_length(s.xi.col(j) + off, s.xi.col(j + 1) + off, c, r);
    }
    return total;
}

double curve_diameter(const SheetState& s) {
    const Index m = s.topology == Topology::periodic ? s.size() : s.distinct_nodes();
    double best = 0.0;
    for (Index i = 0; i < m; ++i)
        for (Index j = i + 1; j < m; ++j) best = std::max(best, (s.xi.col(i) - s.xi.col(j)).squaredNorm());
    return std::sqrt(best);
}

double min_segment_length(const SheetState& s) {
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j + 1 < s.size(); ++j) best = std::min(best, (s.xi.col(j + 1) - s.xi.col(j)).norm());
    return best;
}

namespace {

struct DiskSampler {
    const SheetState& s;
    std::vector<Segment> segs;

    explicit DiskSampler(const SheetState& st) : s(st) {
        const Point2 shift = st.period_shift();
        const auto base = segments_of(st);
        if (st.topology != Topology::periodic) {
            segs = base;
            return;
        }
        // Three copies cover every disk centered within one period of radius
        // up to a period length; larger disks are clipped copy by copy below.
        for (Index k = -1; k <= 1; ++k)
            for (const auto& g : base)
                segs.push_back({g.a + static_cast<double>(k) * shift, g.b + static_cast<double>(k) * shift});
    }

    double length(const Point2& c, double r) const {
        if (s.topology == Topology::periodic) return curve_length_in_disk(s, c, r);
        double total = 0.0;
        for (const auto& g : segs) total += clipped_length(g.a, g.b, c, r);
        return total;
    }

    /// Best ratio over the given radii for one center.
    std::pair<double, double> best_ratio(const Point2& c, const std::vector<double>& radii) const {
        double best = 0.0;
        double best_r = radii.empty() ? 0.0 : radii.front();
        if (s.topology == Topology::periodic) {
            for (double r : radii) {
                const double q = curve_length_in_disk(s, c, r) / r;
                if (q > best) { best = q; best_r = r; }
            }
            return {best, best_r};
        }
        std::vector<double> dmin(segs.size());
        std::vector<double> dmax(segs.size());
        std::vector<double> len(segs.size());
        for (std::size_t i = 0; i < segs.size(); ++i) {
            dmin[i] = point_segment_distance(c, segs[i].a, segs[i].b);
            dmax[i] = std::max((segs[i].a - c).norm(), (segs[i].b - c).norm());
            len[i] = (segs[i].b - segs[i].a).norm();
        }
        for (double r : radii) {
            double total = 0.0;
            for (std::size_t i = 0; i < segs.size(); ++i) {
                if (r < dmin[i]) continue;
                total += r >= dmax[i] ? len[i] : clipped_length(segs[i].a, segs[i].b, c, r);
            }
            const double q = total / r;
            if (q > best) { best = q; best_r = r; }
        }
        return {best, best_r};
    }
};

}  // namespace

RegularityReport estimate_regularity_constant(const SheetState& s, const RegularityOptions& opt) {
    RegularityReport rep;
    const double diam = curve_diameter(s);
    std::vector<double> radii = opt.radii;
    if (radii.empty()) {
        const double lo = min_segment_length(s);
        const double hi = std::max(diam, lo * 1.0000001);
        const int count = 24;
        for (int k = 0; k < count; ++k)
            radii.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1)));
    }
    for (double r : radii)
        if (!(r > 0.0)) fail(ErrorKind::invalid_state, "radii must be positive");
    rep.r_grid = radii;

    std::vector<Point2> centers;
    const Index m = s.distinct_nodes();
    for (Index j = 0; j < s.size(); ++j) centers.push_back(s.xi.col(j));
    const Point2 lo_box = s.xi.rowwise().minCoeff();
    const Point2 hi_box = s.xi.rowwise().maxCoeff();
    const Point2 mid = 0.5 * (lo_box + hi_box);
    const Point2 half = 0.5 * opt.inflate * (hi_box - lo_box);
    double spacing = 0.0;
    if (opt.lattice > 1) {
        spacing = 2.0 * half.maxCoeff() / (opt.lattice - 1);
        for (int a = 0; a < opt.lattice; ++a)
            for (int b = 0; b < opt.lattice; ++b) {
                const double fx = -1.0 + 2.0 * a / (opt.lattice - 1);
                const double fy = -1.0 + 2.0 * b / (opt.lattice - 1);
                centers.push_back(mid + Point2(fx * half.x(), fy * half.y()));
            }
    }
    (void)m;

    const DiskSampler sampler(s);
    std::vector<std::pair<double, double>> results(centers.size());
    detail::parallel_for(static_cast<std::int64_t>(centers.size()),
                         [&](std::int64_t i) { results[static_cast<std::size_t>(i)] = sampler.best_ratio(centers[static_cast<std::size_t>(i)], radii); });
    rep.centers_sampled = static_cast<Index>(centers.size());

    std::vector<std::size_t> order(centers.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return results[a].first > results[b].first; });
    rep.a_estimate = results[order[0]].first;
    rep.worst_center = centers[order[0]];
    rep.worst_radius = results[order[0]].second;

    if (opt.refine && radii.size() > 1) {
        std::vector<double> sorted = radii;
        std::sort(sorted.begin(), sorted.end());
        double ratio = 1.0;
        for (std::size_t k = 1; k < sorted.size(); ++k) ratio = std::max(ratio, sorted[k] / sorted[k - 1]);
        ratio = std::max(ratio, 1.01);
        const double min_step = 1e-4 * std::max(diam, 1e-300);
        double step0 = spacing > 0.0 ? spacing : min_segment_length(s);

        const double r_lo = sorted.front();
        const double r_hi = sorted.back();
        auto local_radii = [&](const Point2& c, double r0) {
            std::vector<double> rs;
            for (int k = -8; k <= 8; ++k) rs.push_back(std::clamp(r0 * std::pow(ratio, k / 8.0), r_lo, r_hi));
            const double lo = std::max(r0 / ratio, r_lo);
            const double hi = std::min(r0 * ratio, r_hi);
            for (Index j = 0; j < s.size(); ++j) {
                const double d = (s.xi.col(j) - c).norm() * (1.0 + 1e-12);
                if (d >= lo && d <= hi && d > 0.0) rs.push_back(d);
            }
            return rs;
        };

        const int candidates = std::min<int>(opt.refine_candidates, static_cast<int>(order.size()));
        for (int ci = 0; ci < candidates; ++ci) {
            Point2 c = centers[order[static_cast<std::size_t>(ci)]];
            auto [best, r] = results[order[static_cast<std::size_t>(ci)]];
            {
                const auto [q, rq] = sampler.best_ratio(c, local_radii(c, r));
                ++rep.centers_sampled;
                if (q > best) { best = q; r = rq; }
            }
            double step = step0;
            while (step > min_step) {
                bool improved = false;
                for (int dx = -1; dx <= 1; ++dx)
                    for (int dy = -1; dy <= 1; ++dy) {
                        if (dx == 0 && dy == 0) continue;
                        const Point2 trial = c + step * Point2(dx, dy);
                        const auto [q, rq] = sampler.best_ratio(trial, local_radii(trial, r));
                        ++rep.centers_sampled;
                        if (q > best * (1.0 + 1e-9)) {
                            best = q;
                            r = rq;
                            c = trial;
                            improved = true;
                        }
                    }
                if (!improved) step *= 0.5;
            }
            if (best > rep.a_estimate) {
                rep.a_estimate = best;
                rep.worst_center = c;
                rep.worst_radius = r;
            }
        }
    }

    rep.l1_gamma = lp_norm(s, 1.0);
    rep.l2_gamma = lp_norm(s, 2.0);
    return rep;
}

double distance_to_curve(const SheetState& s, const Point2& p) {
    const auto [first, last] = copy_range(s, p.x(), p.x(), 0.0);
    const Point2 shift = s.period_shift();
    double best = std::numeric_limits<double>::infinity();
    for (Index k = first - 1; k <= last + 1; ++k) {
        if (s.topology != Topology::periodic && k != 0) continue;
        const Point2 off = static_cast<double>(k) * shift;
        for (Index j = 0; j + 1 < s.size(); ++j)
            best = std::min(best, point_segment_distance(p, s.xi.col(j) + off, s.xi.col(j + 1) + off));
    }
    return best;
}

SheetState refine_state(const SheetState& s, int factor) {
    if (factor <= 1) return s;
    const Index n = s.size();
    const Index n_out = (n - 1) * factor + 1;
    const NodeView v(s);
    SheetState out;
    out.t = s.t;
    out.topology = s.topology;
    out.param_kind = s.param_kind;
    out.eta.resize(n_out);
    out.xi.resize(2, n_out);
    out.sigma.resize(n_out);
    for (Index j = 0; j + 1 < n; ++j) {
        for (int k = 0; k < factor; ++k) {
            const Index o = j * factor + k;
            const double e = s.eta(j) + (s.eta(j + 1) - s.eta(j)) * static_cast<double>(k) / factor;
            out.eta(o) = e;
            if (k == 0) {
                out.xi.col(o) = s.xi.col(j);
                out.sigma(o) = s.sigma(j);
            } else {
                const auto smp = detail::sample_in_cell<6>(v, j, e);
                out.xi.col(o) = smp.xi;
                out.sigma(o) = smp.sigma;
            }
        }
    }
    out.eta(n_out - 1) = s.eta(n - 1);
    out.xi.col(n_out - 1) = s.xi.col(n - 1);
    out.sigma(n_out - 1) = s.sigma(n - 1);
    return out;
}

double hausdorff_distance(const SheetState& a, const SheetState& b, int refine) {
    auto one_sided = [refine](const SheetState& from, const SheetState& to) {
        const SheetState dense = refine_state(to, refine);
        double worst = 0.0;
        for (Index j = 0; j < from.size(); ++j) worst = std::max(worst, distance_to_curve(dense, from.xi.col(j)));
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

double min_nonadjacent_segment_distance(const SheetState& s) {
    const auto segs = segments_of(s);
    const auto count = static_cast<Index>(segs.size());
    double best = std::numeric_limits<double>::infinity();
    if (count < 4) return best;
    const Point2 shift = s.period_shift();
    for (Index i = 0; i < count; ++i) {
        for (Index j = i + 2; j < count; ++j) {
            if (s.wraps() && i == 0 && j == count - 1) continue;
            best = std::min(best, segment_distance(segs[static_cast<std::size_t>(i)], segs[static_cast<std::size_t>(j)]));
        }
        if (s.topology == Topology::periodic) {
            // Neighbouring copies: only segments away from the shared ends can meet.
            for (Index j = 0; j < count; ++j) {
                if ((i == count - 1 && j == 0) || (i == 0 && j == count - 1)) continue;
                const Segment moved{segs[static_cast<std::size_t>(j)].a + shift, segs[static_cast<std::size_t>(j)].b + shift};
                if (!(i == count - 1 && j <= 1)) best = std::min(best, segment_distance(segs[static_cast<std::size_t>(i)], moved));
            }
        }
    }
    return best;
}

}  // namespace vsheet
