// Copyright 2026 The DGform Authors
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

#ifndef DGFORM_NET_GRAPH_BATCH_H_
#define DGFORM_NET_GRAPH_BATCH_H_

#include <utility>
#include <vector>

#include "dgform/tensor/tensor.h"

namespace dgform {

// One heterogeneous graph with object and manipulator node features.
// Object-object edges are undirected; manipulator-object edges are
// (manipulator, object) pairs carrying messages both ways.
struct GraphInstance {
  Tensor obj;  // n_obj x obj_dim
  Tensor man;  // n_man x man_dim, may have zero rows
  std::vector<std::pair<int, int>> oo;
  std::vector<std::pair<int, int>> mo;
};

// Block-diagonal stack of graphs sharing node counts. Aggregation matrices
// take the mean over neighbours of one edge type; nodes without neighbours of
// that type receive a zero message.
struct GraphBatch {
  int num_graphs = 0;
  int obj_per_graph = 0;
  int man_per_graph = 0;
  Tensor obj_x;
  Tensor man_x;
  SparseMatrix obj_from_obj;   // (B n_o) x (B n_o)
  SparseMatrix obj_from_man;   // (B n_o) x (B n_m)
  SparseMatrix man_from_obj;   // (B n_m) x (B n_o)
  SparseMatrix obj_mean;       // B x (B n_o)
  SparseMatrix man_mean;       // B x (B n_m)
  SparseMatrix all_mean_obj;   // B x (B n_o), weight 1 / (n_o + n_m)
  SparseMatrix all_mean_man;   // B x (B n_m), weight 1 / (n_o + n_m)
  SparseMatrix man_mean_to_obj;  // (B n_o) x (B n_m): graph's manipulator mean

  // ShapeError when node counts or feature widths differ across graphs;
  // ContractError on an out-of-range edge or non-finite feature.
  static GraphBatch Build(const std::vector<GraphInstance>& graphs);
};

}  // namespace dgform

#endif  // DGFORM_NET_GRAPH_BATCH_H_
