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

#include "dgform/net/graph_batch.h"

#include <algorithm>
#include <string>

#include "dgform/common/error.h"

namespace dgform {
namespace {

using Entries = std::vector<SparseMatrix::Entry>;

// Mean-aggregation rows from per-destination neighbour lists.
void AppendMean(const std::vector<std::vector<int>>& neighbours, int row_offset,
                int col_offset, Entries& out) {
  for (size_t d = 0; d < neighbours.size(); ++d) {
    const auto& n = neighbours[d];
    for (int s : n) {
      out.push_back({row_offset + static_cast<int>(d), col_offset + s,
                     1.0 / static_cast<double>(n.size())});
    }
  }
}

void CheckIndex(int i, int n, const char* what) {
  if (i < 0 || i >= n) {
    throw ContractError(std::string("graph batch: ") + what + " index " +
                        std::to_string(i) + " out of range");
  }
}

}  // namespace

GraphBatch GraphBatch::Build(const std::vector<GraphInstance>& graphs) {
  if (graphs.empty()) throw ContractError("graph batch: no graphs");
  const GraphInstance& first = graphs.front();
  const int n_o = first.obj.rows();
  const int n_m = first.man.rows();
  const int d_o = first.obj.cols();
  const int d_m = first.man.cols();
  const int b = static_cast<int>(graphs.size());

  GraphBatch batch;
  batch.num_graphs = b;
  batch.obj_per_graph = n_o;
  batch.man_per_graph = n_m;
  batch.obj_x = Tensor(b * n_o, d_o);
  batch.man_x = Tensor(b * n_m, d_m);

  Entries oo, om, mo, obj_mean, man_mean, all_obj, all_man, expand;
  const double all_w = 1.0 / (n_o + n_m);
  for (int g = 0; g < b; ++g) {
    const GraphInstance& inst = graphs[g];
    if (inst.obj.rows() != n_o || inst.man.rows() != n_m ||
        inst.obj.cols() != d_o || inst.man.cols() != d_m) {
      throw ShapeError("graph batch: graph " + std::to_string(g) +
                       " differs in node counts or feature widths");
    }
    if (!inst.obj.AllFinite() || !inst.man.AllFinite()) {
      throw ContractError("graph batch: non-finite node attributes");
    }
    std::copy(inst.obj.data().begin(), inst.obj.data().end(),
              batch.obj_x.data().begin() + g * n_o * d_o);
    std::copy(inst.man.data().begin(), inst.man.data().end(),
              batch.man_x.data().begin() + g * n_m * d_m);

    std::vector<std::vector<int>> obj_nbr(n_o), obj_man_nbr(n_o), man_obj_nbr(n_m);
    for (const auto& [a, c] : inst.oo) {
      CheckIndex(a, n_o, "object");
      CheckIndex(c, n_o, "object");
      obj_nbr[a].push_back(c);
      obj_nbr[c].push_back(a);
    }
    for (const auto& [m, o] : inst.mo) {
      CheckIndex(m, n_m, "manipulator");
      CheckIndex(o, n_o, "object");
      obj_man_nbr[o].push_back(m);
      man_obj_nbr[m].push_back(o);
    }
    AppendMean(obj_nbr, g * n_o, g * n_o, oo);
    AppendMean(obj_man_nbr, g * n_o, g * n_m, om);
    AppendMean(man_obj_nbr, g * n_m, g * n_o, mo);
    for (int i = 0; i < n_o; ++i) {
      obj_mean.push_back({g, g * n_o + i, 1.0 / n_o});
      all_obj.push_back({g, g * n_o + i, all_w});
      for (int m = 0; m < n_m; ++m) {
        expand.push_back({g * n_o + i, g * n_m + m, 1.0 / n_m});
      }
    }
    for (int m = 0; m < n_m; ++m) {
      man_mean.push_back({g, g * n_m + m, 1.0 / n_m});
      all_man.push_back({g, g * n_m + m, all_w});
    }
  }
  batch.obj_from_obj = SparseMatrix(b * n_o, b * n_o, std::move(oo));
  batch.obj_from_man = SparseMatrix(b * n_o, b * n_m, std::move(om));
  batch.man_from_obj = SparseMatrix(b * n_m, b * n_o, std::move(mo));
  batch.obj_mean = SparseMatrix(b, b * n_o, std::move(obj_mean));
  batch.man_mean = SparseMatrix(b, b * n_m, std::move(man_mean));
  batch.all_mean_obj = SparseMatrix(b, b * n_o, std::move(all_obj));
  batch.all_mean_man = SparseMatrix(b, b * n_m, std::move(all_man));
  batch.man_mean_to_obj = SparseMatrix(b * n_o, b * n_m, std::move(expand));
  return batch;
}

}  // namespace dgform
