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

#include <cstddef>
#include <span>
#include <vector>

namespace rsde::transport {

struct AssignmentResult {
  // row_to_col[i] is the column matched to row i.
  std::vector<std::size_t> row_to_col;
  double cost = 0.0;
  // Dual certificate: row_dual[i] + col_dual[j] <= cost(i, j), with equality
  // on matched pairs.
  std::vector<double> row_dual;
  std::vector<double> col_dual;
};

// Minimum-cost perfect matching on a dense n x n row-major cost matrix.
// Shortest augmenting paths with dual potentials (Jonker-Volgenant style),
// O(n^3).
AssignmentResult solve_assignment(std::span<const double> cost, std::size_t n);

struct TransportEntry {
  std::size_t source;
  std::size_t sink;
  double mass;
};

struct TransportResult {
  double cost = 0.0;
  std::vector<TransportEntry> plan;
  // source_dual[i] + sink_dual[j] <= cost(i, j); equality on the support of
  // the plan, and the dual objective equals the primal cost.
  std::vector<double> source_dual;
  std::vector<double> sink_dual;
};

// Exact discrete optimal transport between weighted atom sets (supply and
// demand each sum to one) by successive shortest paths on the bipartite
// network with reduced-cost potentials. Cost is row-major m x n.
TransportResult solve_transport(std::span<const double> cost, std::span<const double> supply,
                                std::span<const double> demand);

}  // namespace rsde::transport
