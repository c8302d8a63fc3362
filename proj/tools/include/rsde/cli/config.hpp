// Copyright 2026 The rsde Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsde/measures.hpp"
#include "rsde/pde.hpp"
#include "rsde/sde.hpp"
#include "rsde/verify.hpp"

namespace rsde::cli {

using Json = nlohmann::json;

struct VerifySettings {
  std::vector<std::string> checks;
  Json raw = Json::object();  // per-check sections
};

struct PicardSettings {
  sde::PicardOptions options;
};

struct CoupleSettings {
  Vec x0;
  Vec y0;
  sde::CouplingOptions options;
};

struct PdeSettings {
  bool present = false;
  std::array<double, 2> lower{0.0, 0.0};
  std::array<double, 2> upper{1.0, 1.0};
  std::array<std::size_t, 2> cells{100, 100};
  std::vector<double> snapshot_times;
};

struct RunConfig {
  Json document;
  sde::SimConfig sim;
  VerifySettings verify;
  PicardSettings picard;
  std::optional<CoupleSettings> couple;
  PdeSettings pde;
};

// Parses and validates a configuration document. Throws ConfigError naming
// the offending field.
RunConfig parse_config(const Json& doc);
RunConfig load_config(const std::string& path);

// Building blocks shared with verify sections.
geometry::Domain parse_domain(const Json& j, const std::string& path);
sde::CoefficientSpec parse_coefficients(const Json& j, int dim, const std::string& path);
sde::InitialLaw parse_initial(const Json& j, int dim, const std::string& path);
std::vector<double> parse_number_list(const Json& j, const std::string& path);
Vec parse_vec(const Json& j, int dim, const std::string& path);

// Named bounded test functions: "one", "sin", "cos", "x1", "lower_half".
std::function<double(const Vec&)> parse_test_function(const Json& j, const std::string& path);

}  // namespace rsde::cli
