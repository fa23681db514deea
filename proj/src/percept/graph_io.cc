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

#include "dgform/percept/graph_io.h"

#include <string>

#include "dgform/common/error.h"

namespace dgform {
namespace {

using nlohmann::json;

const char* EdgeName(EdgeType t) {
  return t == EdgeType::kObjectObject ? "oo" : "mo";
}

ObjectNode NodeFromJson(const json& j) {
  return {j.at("x").get<double>(), j.at("y").get<double>(),
          j.at("depth").get<double>()};
}

}  // namespace

json SubgraphToJson(const ObjectSubgraph& sub) {
  json nodes = json::array();
  for (const ObjectNode& n : sub.nodes) {
    nodes.push_back({{"x", n.x}, {"y", n.y}, {"depth", n.depth}});
  }
  return {{"nodes", nodes}};
}

ObjectSubgraph SubgraphFromJson(const json& j) {
  try {
    const json& nodes = j.at("nodes");
    if (!nodes.is_array() || nodes.size() != kObjectNodes) {
      throw ParseError("subgraph must have 9 nodes", 0);
    }
    ObjectSubgraph sub;
    for (int i = 0; i < kObjectNodes; ++i) sub.nodes[i] = NodeFromJson(nodes[i]);
    return sub;
  } catch (const json::exception& e) {
    throw ParseError(std::string("subgraph: ") + e.what(), 0);
  }
}

json GraphToJson(const HeteroGraph& graph) {
  json nodes = json::array();
  for (const ObjectNode& n : graph.object.nodes) {
    nodes.push_back({{"type", "object"}, {"attrs", {n.x, n.y, n.depth}}});
  }
  for (const EePose& p : graph.manipulators) {
    nodes.push_back({{"type", "manipulator"}, {"attrs", p.ToArray()}});
  }
  json edges = json::array();
  for (const TypedEdge& e : graph.Edges()) {
    edges.push_back({{"type", EdgeName(e.type)}, {"endpoints", {e.src, e.dst}}});
  }
  return {{"nodes", nodes}, {"edges", edges}};
}

HeteroGraph GraphFromJson(const json& j) {
  HeteroGraph g;
  try {
    const json& nodes = j.at("nodes");
    if (!nodes.is_array() || nodes.size() != HeteroGraph::kNumNodes) {
      throw ParseError("graph must have 11 nodes", 0);
    }
    for (int i = 0; i < HeteroGraph::kNumNodes; ++i) {
      const std::string type = nodes[i].at("type").get<std::string>();
      const auto attrs = nodes[i].at("attrs").get<std::vector<double>>();
      if (i < kObjectNodes) {
        if (type != "object" || attrs.size() != 3) {
          throw ParseError("node " + std::to_string(i) + ": expected object", 0);
        }
        g.object.nodes[i] = {attrs[0], attrs[1], attrs[2]};
      } else {
        if (type != "manipulator" || attrs.size() != EePose::kDim) {
          throw ParseError(
              "node " + std::to_string(i) + ": expected manipulator", 0);
        }
        g.manipulators[i - kObjectNodes] = EePose::FromArray(attrs);
      }
    }
    std::vector<TypedEdge> edges;
    for (const json& e : j.at("edges")) {
      const std::string type = e.at("type").get<std::string>();
      const auto ends = e.at("endpoints").get<std::vector<int>>();
      if (ends.size() != 2 || (type != "oo" && type != "mo")) {
        throw ParseError("malformed edge", 0);
      }
      edges.push_back({type == "oo" ? EdgeType::kObjectObject
                                    : EdgeType::kManipulatorObject,
                       ends[0], ends[1]});
    }
    if (edges != g.Edges()) throw ParseError("unexpected edge set", 0);
  } catch (const json::exception& e) {
    throw ParseError(std::string("graph: ") + e.what(), 0);
  }
  return g;
}

}  // namespace dgform
