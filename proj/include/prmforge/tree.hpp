#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "prmforge/mc.hpp"

namespace prmforge::tree {

/**
 * One prefix of reasoning steps. The root holds the empty prefix; every
 * child extends its parent's prefix by exactly one step (the child's map
 * key). `mc` pools all evidence gathered for this prefix, `visits` counts
 * selections of this node as a search origin, and `incorrect_pool` holds
 * incorrect parsed rollouts through this node that have not been searched
 * yet.
 */
struct TreeNode {
  std::vector<std::string> prefix;
  std::optional<MCEstimate> mc;
  int visits = 0;
  TreeNode* parent = nullptr;
  std::map<std::string, std::unique_ptr<TreeNode>> children;
  std::deque<RolloutRecord> incorrect_pool;
  std::set<std::string> seen_rollouts;  // rendered paths already pooled here

  bool is_root() const { return prefix.empty(); }
  const std::string& step() const;  // last prefix element; ValidationError on root
};

/**
 * Per-problem state-action tree. Nodes are created on demand when a
 * prefix is first evaluated; intermediate nodes along the path exist
 * structurally but carry no estimate until evaluated themselves.
 */
class AnnotationTree {
 public:
  AnnotationTree();

  TreeNode& root() { return *root_; }
  const TreeNode& root() const { return *root_; }

  // Walks prefix from the root, creating missing nodes, and returns the
  // node holding exactly this prefix.
  TreeNode& insert_prefix(std::span<const std::string> prefix);

  // Pools the estimate into node.mc and appends the estimate's incorrect
  // parsed rollouts to node.incorrect_pool, skipping paths the node has
  // already pooled.
  void set_estimate(TreeNode& node, const MCEstimate& estimate);

  // Node holding exactly this prefix, or nullptr.
  TreeNode* find(std::span<const std::string> prefix);
  const TreeNode* find(std::span<const std::string> prefix) const;

  // Preorder walk; children visited in lexicographic step order, so the
  // visit sequence is deterministic.
  void walk(const std::function<void(const TreeNode&)>& visit) const;
  void walk(const std::function<void(TreeNode&)>& visit);

  // Verifies the parent/child prefix-extension invariant over the whole
  // tree; throws ValidationError on any violation.
  void check_structure() const;

  size_t size() const;  // total node count, root included

 private:
  std::unique_ptr<TreeNode> root_;
};

}  // namespace prmforge::tree
