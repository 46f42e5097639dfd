#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "prmforge/error.hpp"
#include "prmforge/tree.hpp"

using namespace prmforge;
using tree::AnnotationTree;
using tree::TreeNode;

namespace {

MCEstimate make_estimate(int n_correct, int n_total,
                         std::vector<Solution> incorrect_paths = {}) {
  std::vector<RolloutRecord> rollouts;
  for (int i = 0; i < n_correct; ++i) rollouts.push_back({0, i, std::nullopt, true});
  int draw = n_correct;
  for (auto& path : incorrect_paths)
    rollouts.push_back({0, draw++, std::move(path), false});
  while (static_cast<int>(rollouts.size()) < n_total)
    rollouts.push_back({0, draw++, std::nullopt, false});
  return MCEstimate::from_rollouts(std::move(rollouts));
}

}  // namespace

TEST_CASE("the root holds the empty prefix") {
  AnnotationTree t;
  CHECK(t.root().is_root());
  CHECK(t.root().prefix.empty());
  CHECK(t.size() == 1);
  CHECK_THROWS_AS(t.root().step(), ValidationError);
}

TEST_CASE("insert_prefix creates intermediate nodes structurally") {
  AnnotationTree t;
  const std::vector<std::string> prefix{"a", "b", "c"};
  TreeNode& node = t.insert_prefix(prefix);
  CHECK(node.prefix == prefix);
  CHECK(node.step() == "c");
  CHECK(t.size() == 4);  // root + a + ab + abc

  const TreeNode* mid = t.find(std::vector<std::string>{"a", "b"});
  REQUIRE(mid != nullptr);
  CHECK_FALSE(mid->mc);  // structural only, never evaluated
  CHECK(mid->children.count("c") == 1);
  CHECK(node.parent == mid);
}

TEST_CASE("insert_prefix is idempotent") {
  AnnotationTree t;
  const std::vector<std::string> prefix{"a", "b"};
  TreeNode& first = t.insert_prefix(prefix);
  TreeNode& again = t.insert_prefix(prefix);
  CHECK(&first == &again);
  CHECK(t.size() == 3);
}

TEST_CASE("empty step texts are rejected") {
  AnnotationTree t;
  CHECK_THROWS_AS(t.insert_prefix(std::vector<std::string>{"a", ""}), ValidationError);
}

TEST_CASE("find returns nullptr for unknown prefixes") {
  AnnotationTree t;
  t.insert_prefix(std::vector<std::string>{"a"});
  CHECK(t.find(std::vector<std::string>{"b"}) == nullptr);
  CHECK(t.find(std::vector<std::string>{"a", "x"}) == nullptr);
  CHECK(t.find(std::vector<std::string>{}) == &t.root());
}

TEST_CASE("set_estimate pools evidence on revisit") {
  AnnotationTree t;
  TreeNode& node = t.insert_prefix(std::vector<std::string>{"a"});
  t.set_estimate(node, make_estimate(1, 2));
  REQUIRE(node.mc);
  CHECK(node.mc->value == 0.5);
  t.set_estimate(node, make_estimate(3, 4));
  CHECK(node.mc->n_rollouts == 6);
  CHECK(node.mc->n_correct == 4);
  CHECK(node.mc->value == 4.0 / 6.0);
}

TEST_CASE("incorrect parsed rollouts land in the pool; unparsed ones do not") {
  AnnotationTree t;
  TreeNode& node = t.insert_prefix(std::vector<std::string>{"a"});
  const Solution bad{{"a", "wrong turn"}, "9"};
  // 1 correct, 1 incorrect-with-path, 1 incorrect-unparsed.
  t.set_estimate(node, make_estimate(1, 3, {bad}));
  CHECK(node.incorrect_pool.size() == 1);
  REQUIRE(node.incorrect_pool.front().full_path);
  CHECK(*node.incorrect_pool.front().full_path == bad);
}

TEST_CASE("pooled rollouts deduplicate by rendered path") {
  AnnotationTree t;
  TreeNode& node = t.insert_prefix(std::vector<std::string>{"a"});
  const Solution bad{{"a", "wrong turn"}, "9"};
  t.set_estimate(node, make_estimate(0, 1, {bad}));
  t.set_estimate(node, make_estimate(0, 1, {bad}));  // same path again
  CHECK(node.incorrect_pool.size() == 1);
  CHECK(node.mc->n_rollouts == 2);  // evidence still pools
}

TEST_CASE("walk visits preorder with lexicographic children") {
  AnnotationTree t;
  t.insert_prefix(std::vector<std::string>{"b"});
  t.insert_prefix(std::vector<std::string>{"a", "z"});
  t.insert_prefix(std::vector<std::string>{"a", "y"});

  std::vector<std::string> order;
  t.walk([&](const TreeNode& n) {
    order.push_back(n.is_root() ? "<root>" : n.step());
  });
  CHECK(order == std::vector<std::string>{"<root>", "a", "y", "z", "b"});
}

TEST_CASE("mutable walk can update nodes") {
  AnnotationTree t;
  t.insert_prefix(std::vector<std::string>{"a"});
  t.walk([](TreeNode& n) { n.visits += 1; });
  CHECK(t.root().visits == 1);
  CHECK(t.find(std::vector<std::string>{"a"})->visits == 1);
}

TEST_CASE("check_structure accepts well-formed trees") {
  AnnotationTree t;
  t.insert_prefix(std::vector<std::string>{"a", "b"});
  t.insert_prefix(std::vector<std::string>{"c"});
  CHECK_NOTHROW(t.check_structure());
}

TEST_CASE("check_structure rejects corrupted prefixes") {
  AnnotationTree t;
  TreeNode& node = t.insert_prefix(std::vector<std::string>{"a", "b"});
  node.prefix.back() = "not-b";  // break the edge-key/prefix agreement
  CHECK_THROWS_AS(t.check_structure(), ValidationError);
}

TEST_CASE("check_structure rejects negative visits") {
  AnnotationTree t;
  TreeNode& node = t.insert_prefix(std::vector<std::string>{"a"});
  node.visits = -1;
  CHECK_THROWS_AS(t.check_structure(), ValidationError);
}
