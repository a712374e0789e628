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

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace vsheet {

using Json = nlohmann::json;

/// Seventeen significant digits, enough to round-trip any double.
std::string format_double(double value);

/// {t, param_kind, topology, eta, xi: [[x, y], ...], sigma}.
Json state_to_json(const SheetState& state);
/// Throws SheetError(format) on missing or malformed fields.
SheetState state_from_json(const Json& j);

/// FNV-1a 64 of the compact dump (keys sorted), as 16 hex digits.
std::string config_hash(const Json& config);

/// One state per line; every line also carries "config_hash".
void write_trajectory(std::ostream& os, const SheetTrajectory& traj, std::string_view hash);
/// Reads JSON lines, skipping blank ones. Throws SheetError(format).
SheetTrajectory read_trajectory(std::istream& is);

SheetTrajectory read_trajectory_file(const std::string& path);
void write_trajectory_file(const std::string& path, const SheetTrajectory& traj, std::string_view hash);

/// Parses a JSON document. Throws SheetError(config) when unreadable.
Json read_json_file(const std::string& path);
/// Two-space indented dump followed by a newline.
void write_json_file(const std::string& path, const Json& j);

/// Comma-separated table preceded by the line "# config_hash=<hash>".
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    void write(std::ostream& os, std::string_view hash) const;
    void write_file(const std::string& path, std::string_view hash) const;
};

/// Cell helpers for CsvTable.
inline std::string csv_cell(double v) { return format_double(v); }
inline std::string csv_cell(bool v) { return v ? "1" : "0"; }
inline std::string csv_cell(long long v) { return std::to_string(v); }
inline std::string csv_cell(std::string v) { return v; }

}  // namespace vsheet
