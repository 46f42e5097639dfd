#include "prmforge/tree.hpp"

#include "prmforge/cot.hpp"
#include "prmforge/error.hpp"

namespace prmforge::tree {

const std::string& TreeNode::step() const {
  if (prefix.empty()) throw ValidationError("the root node has no step");
  return prefix.back();
}

AnnotationTree::AnnotationTree() : root_(std::make_unique<TreeNode>()) {}

TreeNode& AnnotationTree::insert_prefix(std::span<const std::string> prefix) {
  TreeNode* node = root_.get();
  for (const auto& step : prefix) {
    if (step.empty()) throw ValidationError("prefix steps must be non-empty");
    auto it = node->children.find(step);
    if (it == node->children.end()) {
      auto child = std::make_unique<TreeNode>();
      child->prefix = node->prefix;
      child->prefix.push_back(step);
      child->parent = node;
      it = node->children.emplace(step, std::move(child)).first;
    }
    node = it->second.get();
  }
  return *node;
}

void AnnotationTree::set_estimate(TreeNode& node, const MCEstimate& estimate) {
  if (estimate.n_rollouts < 1)
    throw ValidationError("cannot attach an estimate with no rollouts");
  node.mc = node.mc ? node.mc->merged_with(estimate) : estimate;
  for (const auto& rollout : estimate.rollouts) {
    if (rollout.correct || !rollout.full_path) continue;
    std::string key = cot::render_solution(*rollout.full_path);
    if (node.seen_rollouts.insert(std::move(key)).second)
      node.incorrect_pool.push_back(rollout);
  }
}

TreeNode* AnnotationTree::find(std::span<const std::string> prefix) {
  TreeNode* node = root_.get();
  for (const auto& step : prefix) {
    auto it = node->children.find(step);
    if (it == node->children.end()) return nullptr;
    node = it->second.get();
  }
  return node;
}

const TreeNode* AnnotationTree::find(std::span<const std::string> prefix) const {
  return const_cast<AnnotationTree*>(this)->find(prefix);
}

namespace {

template <typename Node, typename Fn>
void walk_from(Node& node, const Fn& visit) {
  visit(node);
  for (const auto& [step, child] : node.children) walk_from(*child, visit);
}

}  // namespace

void AnnotationTree::walk(const std::function<void(const TreeNode&)>& visit) const {
  walk_from(*root_, visit);
}

void AnnotationTree::walk(const std::function<void(TreeNode&)>& visit) {
  walk_from(*root_, visit);
}

void AnnotationTree::check_structure() const {
  if (!root_->prefix.empty()) throw ValidationError("root prefix must be empty");
  walk([](const TreeNode& node) {
    if (node.visits < 0) throw ValidationError("node visits must be nonnegative");
    for (const auto& [step, child] : node.children) {
      if (child->parent != &node)
        throw ValidationError("child node does not point back to its parent");
      if (child->prefix.size() != node.prefix.size() + 1 ||
          !std::equal(node.prefix.begin(), node.prefix.end(), child->prefix.begin()) ||
          child->prefix.back() != step)
        throw ValidationError("child prefix must extend the parent prefix by its edge step");
    }
  });
}

size_t AnnotationTree::size() const {
  size_t n = 0;
  walk([&n](const TreeNode&) { ++n; });
  return n;
}

}  // namespace prmforge::tree
