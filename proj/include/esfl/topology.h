// Copyright 2026 The ESFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ESFL_TOPOLOGY_H_
#define ESFL_TOPOLOGY_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace esfl {

inline constexpr std::string_view kRootId = "root";

struct TierNode {
  std::string id;
  size_t tier = 0;
  std::optional<std::string> parent;

  bool operator==(const TierNode&) const = default;
};

// Aggregation tree. Clients are exactly the tier-0 nodes, each parent sits
// one tier above its children, there is a single root, and every interior
// node has at least one child.
class TierTopology {
 public:
  TierTopology() = default;

  // Validates the node list; throws kTopology on any violation.
  static TierTopology Create(std::vector<TierNode> nodes);

  // Builds the tree implied by leaf-to-root label paths (root implicit).
  // Interior node ids are the labels themselves.
  static TierTopology FromPaths(
      const std::map<std::string, std::vector<std::string>>& client_paths);

  // All clients directly under the root.
  static TierTopology Flat(std::span<const std::string> client_ids);

  // Sorted by (tier, id).
  const std::vector<TierNode>& nodes() const { return nodes_; }
  const TierNode& node(std::string_view id) const;
  bool Contains(std::string_view id) const;

  const std::string& root() const { return nodes_.back().id; }
  size_t depth() const { return nodes_.empty() ? 0 : nodes_.back().tier + 1; }

  std::vector<std::string> clients() const { return NodesAtTier(0); }
  std::vector<std::string> NodesAtTier(size_t tier) const;

  // Ascending ids.
  const std::vector<std::string>& children(std::string_view id) const;
  std::vector<std::string> DescendantClients(std::string_view id) const;

  bool operator==(const TierTopology& o) const { return nodes_ == o.nodes_; }

 private:
  std::vector<TierNode> nodes_;
  std::map<std::string, size_t, std::less<>> position_;
  std::map<std::string, std::vector<std::string>, std::less<>> children_;
};

}  // namespace esfl

#endif  // ESFL_TOPOLOGY_H_
