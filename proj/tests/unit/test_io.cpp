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
#include "vsheet/oracles.hpp"

#include <doctest.h>

#include <sstream>

using namespace vsheet;

TEST_CASE("doubles are written with 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("config hash is canonical") {
    const Json a = Json::parse(R"({"b": 1, "a": [1, 2], "c": {"y": 2, "x": 1}})");
    const Json b = Json::parse(R"({"c": {"x": 1, "y": 2}, "a": [1, 2], "b": 1})");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    CHECK(config_hash(a) != config_hash(Json::parse(R"({"b": 2, "a": [1, 2], "c": {"y": 2, "x": 1}})")));
    // FNV-1a 64 of the empty object dump "{}".
    CHECK(config_hash(Json::object()) == "08f44b07b5901a25");
}

TEST_CASE("trajectory round trip") {
    const SheetTrajectory traj = prandtl_munk_trajectory(16, 0.5, 0.25);
    std::stringstream ss;
    write_trajectory(ss, traj, "0123456789abcdef");
    const std::string text = ss.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(text.find("\"config_hash\":\"0123456789abcdef\"") != std::string::npos);
    const SheetTrajectory back = read_trajectory(ss);
    REQUIRE(back.size() == traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        CHECK(back.states[k].t == traj.states[k].t);
        CHECK(back.states[k].xi == traj.states[k].xi);
        CHECK(back.states[k].sigma == traj.states[k].sigma);
        CHECK(back.states[k].eta == traj.states[k].eta);
    }
}

TEST_CASE("malformed states are format errors") {
    auto kind_of = [](const std::string& text) {
        try {
            std::stringstream ss(text);
            read_trajectory(ss);
        } catch (const SheetError& e) {
            return e.kind();
        }
        return ErrorKind::invalid_state;
    };
    CHECK(kind_of("") == ErrorKind::format);
    CHECK(kind_of("{not json}") == ErrorKind::format);
    CHECK(kind_of(R"({"t":0,"param_kind":"lagrangian","topology":"open","eta":[0,1],"xi":[[0,0]],"sigma":[1,1]})") ==
          ErrorKind::format);
    CHECK(kind_of(R"({"t":0,"param_kind":"spiral","topology":"open","eta":[0],"xi":[[0,0]],"sigma":[1]})") ==
          ErrorKind::format);
}

TEST_CASE("CSV tables carry the config hash") {
    CsvTable t{{"a", "b"}, {}};
    t.add_row({csv_cell(1.5), csv_cell(true)});
    CHECK_THROWS_AS(t.add_row({"x"}), SheetError);
    std::stringstream ss;
    t.write(ss, "feedfacecafebeef");
    CHECK(ss.str() == "# config_hash=feedfacecafebeef\na,b\n1.5,1\n");
}
