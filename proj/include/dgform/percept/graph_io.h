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

#ifndef DGFORM_PERCEPT_GRAPH_IO_H_
#define DGFORM_PERCEPT_GRAPH_IO_H_

#include "dgform/percept/graph.h"
#include "json.hpp"

namespace dgform {

// {"nodes": [{"x", "y", "depth"} x 9]}
nlohmann::json SubgraphToJson(const ObjectSubgraph& sub);
ObjectSubgraph SubgraphFromJson(const nlohmann::json& j);

// {"nodes": [{"type", "attrs"}], "edges": [{"type", "endpoints"}]}
nlohmann::json GraphToJson(const HeteroGraph& graph);
// ParseError on structural mismatch (node counts, edge set).
HeteroGraph GraphFromJson(const nlohmann::json& j);

}  // namespace dgform

#endif  // DGFORM_PERCEPT_GRAPH_IO_H_
