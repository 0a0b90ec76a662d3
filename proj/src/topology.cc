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

#include "esfl/topology.h"

#include <algorithm>
#include <set>

#include "esfl/error.h"

namespace esfl {

namespace {

[[noreturn]] void Fail(const std::string& msg) { throw Error(ErrorCode::kTopology, msg); }

}  // namespace

TierTopology TierTopology::Create(std::vector<TierNode> nodes) {
  if (nodes.empty()) Fail("topology has no nodes");
  std::sort(nodes.begin(), nodes.end(), [](const TierNode& a, const TierNode& b) {
    return a.tier != b.tier ? a.tier < b.tier : a.id < b.id;
  });

  TierTopology t;
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id.empty()) Fail("node with empty id");
    if (!t.position_.emplace(nodes[i].id, i).second) {
      Fail("duplicate node id \"" + nodes[i].id + "\"");
    }
  }

  size_t roots = 0;
  for (const TierNode& n : nodes) {
    t.children_[n.id];
    if (!n.parent) {
      ++roots;
      continue;
    }
    auto it = t.position_.find(*n.parent);
    if (it == t.position_.end()) {
      Fail("node \"" + n.id + "\" has unknown parent \"" + *n.parent + "\"");
    }
    if (nodes[it->second].tier != n.tier + 1) {
      Fail("parent of \"" + n.id + "\" must sit exactly one tier above it");
    }
  }
  if (roots != 1) Fail("topology must have exactly one root, found " + std::to_string(roots));
  if (nodes.back().parent) Fail("the root must be the highest-tier node");
  if (nodes.back().tier == 0) Fail("the root cannot be a client; need at least one client tier");

  for (const TierNode& n : nodes) {
    if (n.parent) t.children_[*n.parent].push_back(n.id);
  }
  for (auto& [id, kids] : t.children_) std::sort(kids.begin(), kids.end());
  for (const TierNode& n : nodes) {
    if (n.tier > 0 && t.children_[n.id].empty()) {
      Fail("aggregator \"" + n.id + "\" has no children");
    }
  }
  // Tiers strictly increase along parent links, so every node reaches the
  // unique root and there are no cycles.
  t.nodes_ = std::move(nodes);
  return t;
}

TierTopology TierTopology::FromPaths(
    const std::map<std::string, std::vector<std::string>>& client_paths) {
  if (client_paths.empty()) Fail("no clients");
  const size_t depth = client_paths.begin()->second.size();
  std::map<std::string, TierNode> nodes;
  auto add = [&](const std::string& id, size_t tier,
                 std::optional<std::string> parent) {
    if (id == kRootId) Fail("label \"root\" is reserved for the root node");
    auto [it, inserted] = nodes.emplace(id, TierNode{id, tier, parent});
    if (!inserted && (it->second.tier != tier || it->second.parent != parent)) {
      Fail("label \"" + id + "\" appears at two places in the hierarchy");
    }
  };
  for (const auto& [client, path] : client_paths) {
    if (path.size() != depth || path.empty()) {
      Fail("client \"" + client + "\" has a hierarchy path of different length");
    }
    if (path.front() != client) {
      Fail("client \"" + client + "\" must be the first label of its path");
    }
    for (size_t l = 0; l < depth; ++l) {
      std::optional<std::string> parent =
          l + 1 < depth ? std::optional<std::string>(path[l + 1])
                        : std::optional<std::string>(std::string(kRootId));
      add(path[l], l, parent);
    }
  }
  std::vector<TierNode> list;
  list.reserve(nodes.size() + 1);
  for (auto& [id, n] : nodes) list.push_back(std::move(n));
  list.push_back(TierNode{std::string(kRootId), depth, std::nullopt});
  return Create(std::move(list));
}

TierTopology TierTopology::Flat(std::span<const std::string> client_ids) {
  std::vector<TierNode> list;
  for (const std::string& id : client_ids) {
    list.push_back(TierNode{id, 0, std::string(kRootId)});
  }
  list.push_back(TierNode{std::string(kRootId), 1, std::nullopt});
  return Create(std::move(list));
}

const TierNode& TierTopology::node(std::string_view id) const {
  auto it = position_.find(id);
  if (it == position_.end()) Fail("unknown node \"" + std::string(id) + "\"");
  return nodes_[it->second];
}

bool TierTopology::Contains(std::string_view id) const {
  return position_.find(id) != position_.end();
}

std::vector<std::string> TierTopology::NodesAtTier(size_t tier) const {
  std::vector<std::string> out;
  for (const TierNode& n : nodes_) {
    if (n.tier == tier) out.push_back(n.id);
  }
  return out;
}

const std::vector<std::string>& TierTopology::children(std::string_view id) const {
  auto it = children_.find(id);
  if (it == children_.end()) Fail("unknown node \"" + std::string(id) + "\"");
  return it->second;
}

std::vector<std::string> TierTopology::DescendantClients(std::string_view id) const {
  std::vector<std::string> out;
  std::vector<std::string> stack{std::string(id)};
  while (!stack.empty()) {
    std::string cur = std::move(stack.back());
    stack.pop_back();
    if (node(cur).tier == 0) {
      out.push_back(std::move(cur));
      continue;
    }
    for (const std::string& c : children(cur)) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace esfl
