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

#include "vsheet/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vsheet {

namespace {

[[noreturn]] void format_error(const std::string& what) { throw SheetError(ErrorKind::format, what); }

VectorXd read_vector(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) format_error(std::string("missing array '") + key + "'");
    const Json& a = j.at(key);
    VectorXd v(static_cast<Index>(a.size()));
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!a[k].is_number()) format_error(std::string("non-numeric entry in '") + key + "'");
        v(static_cast<Index>(k)) = a[k].get<double>();
    }
    return v;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw SheetError(ErrorKind::config, "cannot write '" + path + "'");
    return os;
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

Json state_to_json(const SheetState& s) {
    Json xi = Json::array();
    for (Index j = 0; j < s.xi.cols(); ++j) xi.push_back({s.xi(0, j), s.xi(1, j)});
    return Json{{"t", s.t},
                {"param_kind", std::string(to_string(s.param_kind))},
                {"topology", std::string(to_string(s.topology))},
                {"eta", std::vector<double>(s.eta.data(), s.eta.data() + s.eta.size())},
                {"xi", std::move(xi)},
                {"sigma", std::vector<double>(s.sigma.data(), s.sigma.data() + s.sigma.size())}};
}

SheetState state_from_json(const Json& j) {
    if (!j.is_object()) format_error("state is not a JSON object");
    SheetState s;
    try {
        s.t = j.at("t").get<double>();
        s.param_kind = param_kind_from_string(j.at("param_kind").get<std::string>());
        s.topology = topology_from_string(j.at("topology").get<std::string>());
    } catch (const Json::exception& e) {
        format_error(std::string("bad state header: ") + e.what());
    }
    s.eta = read_vector(j, "eta");
    s.sigma = read_vector(j, "sigma");
    if (!j.contains("xi") || !j.at("xi").is_array()) format_error("missing array 'xi'");
    const Json& xi = j.at("xi");
    s.xi.resize(2, static_cast<Index>(xi.size()));
    for (std::size_t k = 0; k < xi.size(); ++k) {
        if (!xi[k].is_array() || xi[k].size() != 2 || !xi[k][0].is_number() || !xi[k][1].is_number())
            format_error("xi entries must be [x, y] pairs");
        s.xi(0, static_cast<Index>(k)) = xi[k][0].get<double>();
        s.xi(1, static_cast<Index>(k)) = xi[k][1].get<double>();
    }
    if (s.xi.cols() != s.eta.size() || s.sigma.size() != s.eta.size())
        format_error("eta, xi and sigma lengths differ");
    return s;
}

std::string config_hash(const Json& config) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : config.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

void write_trajectory(std::ostream& os, const SheetTrajectory& traj, std::string_view hash) {
    for (const SheetState& s : traj.states) {
        Json j = state_to_json(s);
        j["config_hash"] = std::string(hash);
        os << j.dump() << '\n';
    }
}

SheetTrajectory read_trajectory(std::istream& is) {
    SheetTrajectory traj;
    std::string line;
    std::size_t number = 0;
    while (std::getline(is, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::exception& e) {
            format_error("line " + std::to_string(number) + ": " + e.what());
        }
        traj.states.push_back(state_from_json(j));
    }
    if (traj.empty()) format_error("trajectory has no states");
    return traj;
}

SheetTrajectory read_trajectory_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw SheetError(ErrorKind::config, "cannot read trajectory '" + path + "'");
    return read_trajectory(is);
}

void write_trajectory_file(const std::string& path, const SheetTrajectory& traj, std::string_view hash) {
    std::ofstream os = open_output(path);
    write_trajectory(os, traj, hash);
}

Json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw SheetError(ErrorKind::config, "cannot read '" + path + "'");
    try {
        return Json::parse(is);
    } catch (const Json::exception& e) {
        throw SheetError(ErrorKind::config, "'" + path + "': " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream os = open_output(path);
    os << j.dump(2) << '\n';
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header.size()) throw SheetError(ErrorKind::format, "CSV row width differs from header");
    rows.push_back(std::move(row));
}

void CsvTable::write(std::ostream& os, std::string_view hash) const {
    auto line = [&os](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << cells[k];
        os << '\n';
    };
    os << "# config_hash=" << hash << '\n';
    line(header);
    for (const auto& r : rows) line(r);
}

void CsvTable::write_file(const std::string& path, std::string_view hash) const {
    std::ofstream os = open_output(path);
    write(os, hash);
}

}  // namespace vsheet
