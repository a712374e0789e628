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

#include <algorithm>
#include <array>
#include <cmath>

namespace vsheet::detail {

inline Index floor_div(Index a, Index b) {
    Index q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline Index wrap_index(Index a, Index b) { return a - floor_div(a, b) * b; }

/// Node access with integer indices extended past the ends of a wrapping
/// sheet: index j + m refers to node j shifted by one period.
class NodeView {
public:
    explicit NodeView(const SheetState& s)
        : s_(s),
          m_(s.distinct_nodes()),
          wraps_(s.wraps()),
          period_(s.wraps() ? s.eta_period() : 0.0),
          shift_(s.period_shift()) {}

    Index count() const { return m_; }
    bool wraps() const { return wraps_; }
    double eta_period() const { return period_; }
    const Point2& shift() const { return shift_; }
    const SheetState& state() const { return s_; }

    double eta(Index j) const {
        if (!wraps_) return s_.eta(j);
        const Index k = floor_div(j, m_);
        return s_.eta(j - k * m_) + static_cast<double>(k) * period_;
    }

    Point2 xi(Index j) const {
        if (!wraps_) return s_.xi.col(j);
        const Index k = floor_div(j, m_);
        return s_.xi.col(j - k * m_) + static_cast<double>(k) * shift_;
    }

    double sigma(Index j) const {
        if (!wraps_) return s_.sigma(j);
        return s_.sigma(wrap_index(j, m_));
    }

private:
    const SheetState& s_;
    Index m_;
    bool wraps_;
    double period_;
    Point2 shift_;
};

/// Weights of the Lagrange interpolant through nodes[0..K-1] at x.
template <std::size_t K>
std::array<double, K> lagrange_weights(const std::array<double, K>& nodes, double x) {
    std::array<double, K> w{};
    for (std::size_t i = 0; i < K; ++i) {
        double num = 1.0;
        double den = 1.0;
        for (std::size_t k = 0; k < K; ++k) {
            if (k == i) continue;
            num *= x - nodes[k];
            den *= nodes[i] - nodes[k];
        }
        w[i] = num / den;
    }
    return w;
}

inline std::array<double, 4> lagrange4_weights(const std::array<double, 4>& nodes, double x) {
    return lagrange_weights<4>(nodes, x);
}

struct CurveSample {
    Point2 xi;
    double sigma;
};

/// Interpolation of positions and density at parameter value e with a
/// K-point stencil centred on the cell (clamped at open ends). `cell` is the
/// index j with eta(j) <= e <= eta(j+1) in extended indexing.
template <std::size_t K = 4>
CurveSample sample_in_cell(const NodeView& v, Index cell, double e) {
    constexpr auto width = static_cast<Index>(K);
    Index first = cell - (width / 2 - 1);
    if (!v.wraps()) {
        const Index n = v.count();
        if (n < width) {
            if (width > 4) return sample_in_cell<4>(v, cell, e);
            const double a = (e - v.eta(cell)) / (v.eta(cell + 1) - v.eta(cell));
            return {(1.0 - a) * v.xi(cell) + a * v.xi(cell + 1),
                    (1.0 - a) * v.sigma(cell) + a * v.sigma(cell + 1)};
        }
        first = std::clamp<Index>(first, 0, n - width);
    } else if (v.count() < width && width > 4) {
        return sample_in_cell<4>(v, cell, e);
    }
    std::array<double, K> nodes{};
    for (std::size_t i = 0; i < K; ++i) nodes[i] = v.eta(first + static_cast<Index>(i));
    const auto w = lagrange_weights<K>(nodes, e);
    CurveSample out{Point2::Zero(), 0.0};
    for (std::size_t i = 0; i < K; ++i) {
        out.xi += w[i] * v.xi(first + static_cast<Index>(i));
        out.sigma += w[i] * v.sigma(first + static_cast<Index>(i));
    }
    return out;
}

/// Locates the cell containing e (extended indexing for wrapping sheets).
inline Index locate_cell(const NodeView& v, double e) {
    const SheetState& s = v.state();
    const Index n = s.size();
    Index shift = 0;
    if (v.wraps()) {
        const double k = std::floor((e - s.eta(0)) / v.eta_period());
        shift = static_cast<Index>(k) * v.count();
        e -= k * v.eta_period();
    }
    const double* begin = s.eta.data();
    const double* it = std::upper_bound(begin, begin + n, e);
    Index j = static_cast<Index>(it - begin) - 1;
    j = std::clamp<Index>(j, 0, n - 2);
    return j + shift;
}

inline CurveSample sample_at(const NodeView& v, double e) {
    return sample_in_cell(v, locate_cell(v, e), e);
}

}  // namespace vsheet::detail
