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

#include "vsheet/detail/nodes.hpp"
#include "vsheet/types.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace vsheet::detail {

/// Cumulative circulation Gamma(eta) measured from the start of the sheet.
///
/// Node j owns the control volume between the midpoints of its neighbouring
/// cells, with circulation w_j sigma_j (trapezoid weight w_j), so Gamma is
/// known exactly at those faces. Elsewhere it is interpolated by cubics
/// through the face values. Wrapping sheets extend Gamma by whole periods.
class CumulativeCirculation {
public:
    explicit CumulativeCirculation(const SheetState& s) : wraps_(s.wraps()) {
        const Index n = s.size();
        const Index m = s.distinct_nodes();
        if (wraps_) {
            period_ = s.eta_period();
            start_ = s.eta(0);
            face_eta_.resize(static_cast<std::size_t>(m));
            face_gamma_.resize(static_cast<std::size_t>(m));
            double acc = 0.0;
            for (Index j = 0; j < m; ++j) {
                const double w = 0.5 * ((j + 1 < n ? s.eta(j + 1) : s.eta(1) + period_) -
                                        (j > 0 ? s.eta(j - 1) : s.eta(n - 2) - period_));
                acc += w * s.sigma(j);
                face_eta_[static_cast<std::size_t>(j)] = 0.5 * (s.eta(j) + s.eta(j + 1));
                face_gamma_[static_cast<std::size_t>(j)] = acc;
            }
            total_ = acc;
        } else {
            face_eta_.push_back(s.eta(0));
            face_gamma_.push_back(0.0);
            double acc = 0.0;
            for (Index j = 0; j + 1 < n; ++j) {
                const double w = 0.5 * (s.eta(j + 1) - (j > 0 ? s.eta(j - 1) : s.eta(0)));
                acc += w * s.sigma(j);
                face_eta_.push_back(0.5 * (s.eta(j) + s.eta(j + 1)));
                face_gamma_.push_back(acc);
            }
            acc += 0.5 * (s.eta(n - 1) - s.eta(n - 2)) * s.sigma(n - 1);
            face_eta_.push_back(s.eta(n - 1));
            face_gamma_.push_back(acc);
            total_ = acc;
        }
    }

    double total() const { return total_; }

    double operator()(double e) const {
        const auto count = static_cast<Index>(face_eta_.size());
        if (!wraps_) {
            e = std::clamp(e, face_eta_.front(), face_eta_.back());
            const auto it = std::upper_bound(face_eta_.begin(), face_eta_.end(), e);
            Index j = std::clamp<Index>(static_cast<Index>(it - face_eta_.begin()) - 1, 0, count - 2);
            const Index first = std::clamp<Index>(j - 1, 0, std::max<Index>(count - 4, 0));
            const Index width = std::min<Index>(4, count);
            if (width < 4) {
                const double a = (e - face_eta_[static_cast<std::size_t>(j)]) /
                                 (face_eta_[static_cast<std::size_t>(j + 1)] - face_eta_[static_cast<std::size_t>(j)]);
                return (1.0 - a) * face_gamma_[static_cast<std::size_t>(j)] + a * face_gamma_[static_cast<std::size_t>(j + 1)];
            }
            std::array<double, 4> nodes{};
            for (int i = 0; i < 4; ++i) nodes[static_cast<std::size_t>(i)] = face_eta_[static_cast<std::size_t>(first + i)];
            const auto w = lagrange4_weights(nodes, e);
            double g = 0.0;
            for (int i = 0; i < 4; ++i) g += w[static_cast<std::size_t>(i)] * face_gamma_[static_cast<std::size_t>(first + i)];
            return g;
        }
        // Extended face k = j + p * count sits at face_eta_[j] + p * period.
        auto face_e = [&](Index k) {
            const Index p = floor_div(k, count);
            return face_eta_[static_cast<std::size_t>(k - p * count)] + static_cast<double>(p) * period_;
        };
        auto face_g = [&](Index k) {
            const Index p = floor_div(k, count);
            return face_gamma_[static_cast<std::size_t>(k - p * count)] + static_cast<double>(p) * total_;
        };
        const double base = face_eta_.front();
        const double shifts = std::floor((e - base) / period_);
        const double local = e - shifts * period_;
        const auto it = std::upper_bound(face_eta_.begin(), face_eta_.end(), local);
        const Index j = static_cast<Index>(it - face_eta_.begin()) - 1;
        std::array<double, 4> nodes{};
        for (int i = 0; i < 4; ++i) nodes[static_cast<std::size_t>(i)] = face_e(j - 1 + i);
        const auto w = lagrange4_weights(nodes, local);
        double g = 0.0;
        for (int i = 0; i < 4; ++i) g += w[static_cast<std::size_t>(i)] * face_g(j - 1 + i);
        return g + shifts * total_;
    }

private:
    bool wraps_;
    double period_ = 0.0;
    double start_ = 0.0;
    double total_ = 0.0;
    std::vector<double> face_eta_;
    std::vector<double> face_gamma_;
};

}  // namespace vsheet::detail
