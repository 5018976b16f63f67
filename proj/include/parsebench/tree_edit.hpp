#pragma once

// Ordered labeled tree edit distance (Zhang-Shasha keyroot decomposition)
// and normalized Levenshtein distance.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <functional>
#include <map>
#include <ranges>
#include <vector>

#include "parsebench/table_model.hpp"

namespace parsebench {

// Edit costs over TreeNodes. Every returned cost must lie in [0,1] and
// substitute_cost(n, n) must be 0.
struct CostModel {
  std::function<double(const TreeNode&)> insert_cost;
  std::function<double(const TreeNode&)> delete_cost;
  std::function<double(const TreeNode&, const TreeNode&)> substitute_cost;
};

template <class Node>
concept OrderedTreeNode = requires(const Node& n) {
  { n.children } -> std::ranges::random_access_range;
  requires std::same_as<std::ranges::range_value_t<decltype(n.children)>, Node>;
};

template <class Cost, class Node>
concept EditCostFor = requires(const Cost& c, const Node& n) {
  { c.insert_cost(n) } -> std::convertible_to<double>;
  { c.delete_cost(n) } -> std::convertible_to<double>;
  { c.substitute_cost(n, n) } -> std::convertible_to<double>;
};

template <std::ranges::random_access_range A, std::ranges::random_access_range B>
std::size_t levenshtein_distance(const A& a, const B& b) {
  const std::size_t n = std::ranges::size(a);
  const std::size_t m = std::ranges::size(b);
  if (n == 0) return m;
  if (m == 0) return n;
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  auto ai = std::ranges::begin(a);
  auto bi = std::ranges::begin(b);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = prev[j - 1] + (ai[i - 1] == bi[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, diag});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

// Levenshtein distance divided by the longer length; 0 when both are empty.
template <std::ranges::random_access_range A, std::ranges::random_access_range B>
double normalized_levenshtein(const A& a, const B& b) {
  const std::size_t longest =
      std::max<std::size_t>(std::ranges::size(a), std::ranges::size(b));
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein_distance(a, b)) /
         static_cast<double>(longest);
}

namespace detail {

template <class Node>
struct PostorderTree {
  std::vector<const Node*> nodes;
  std::vector<std::size_t> leftmost;  // leftmost leaf of each subtree
  std::vector<std::size_t> keyroots;  // ascending

  explicit PostorderTree(const Node& root) {
    visit(root);
    std::map<std::size_t, std::size_t> highest;
    for (std::size_t i = 0; i < nodes.size(); ++i) highest[leftmost[i]] = i;
    for (const auto& [leaf, idx] : highest) keyroots.push_back(idx);
    std::ranges::sort(keyroots);
  }

 private:
  std::size_t visit(const Node& n) {
    std::size_t first_leaf = static_cast<std::size_t>(-1);
    for (const auto& c : n.children) {
      const std::size_t child_leaf = visit(c);
      if (first_leaf == static_cast<std::size_t>(-1)) first_leaf = child_leaf;
    }
    const std::size_t idx = nodes.size();
    nodes.push_back(&n);
    leftmost.push_back(first_leaf == static_cast<std::size_t>(-1) ? idx
                                                                  : first_leaf);
    return leftmost.back();
  }
};

}  // namespace detail

// Minimum total cost of an insert/delete/substitute script turning `a` into
// `b`. Runs in O(|a| |b|) space; time is bounded by the product of the
// keyroot subtree sizes of both trees.
template <OrderedTreeNode Node, EditCostFor<Node> Cost>
double tree_edit_distance(const Node& a, const Node& b, const Cost& cost) {
  const detail::PostorderTree<Node> ta(a);
  const detail::PostorderTree<Node> tb(b);
  const std::size_t n = ta.nodes.size();
  const std::size_t m = tb.nodes.size();

  std::vector<double> del(n), ins(m), sub(n * m), dist(n * m, 0.0);
  for (std::size_t i = 0; i < n; ++i) del[i] = cost.delete_cost(*ta.nodes[i]);
  for (std::size_t j = 0; j < m; ++j) ins[j] = cost.insert_cost(*tb.nodes[j]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      sub[i * m + j] = cost.substitute_cost(*ta.nodes[i], *tb.nodes[j]);
    }
  }

  const std::size_t stride = m + 1;
  std::vector<double> forest((n + 1) * stride);
  for (std::size_t kr1 : ta.keyroots) {
    for (std::size_t kr2 : tb.keyroots) {
      const std::size_t l1 = ta.leftmost[kr1];
      const std::size_t l2 = tb.leftmost[kr2];
      const std::size_t rows = kr1 - l1 + 1;
      const std::size_t cols = kr2 - l2 + 1;
      auto fd = [&](std::size_t x, std::size_t y) -> double& {
        return forest[x * stride + y];
      };
      fd(0, 0) = 0.0;
      for (std::size_t x = 1; x <= rows; ++x) fd(x, 0) = fd(x - 1, 0) + del[l1 + x - 1];
      for (std::size_t y = 1; y <= cols; ++y) fd(0, y) = fd(0, y - 1) + ins[l2 + y - 1];
      for (std::size_t x = 1; x <= rows; ++x) {
        const std::size_t i = l1 + x - 1;
        const double del_i = del[i];
        for (std::size_t y = 1; y <= cols; ++y) {
          const std::size_t j = l2 + y - 1;
          const double via_del = fd(x - 1, y) + del_i;
          const double via_ins = fd(x, y - 1) + ins[j];
          if (ta.leftmost[i] == l1 && tb.leftmost[j] == l2) {
            const double via_sub = fd(x - 1, y - 1) + sub[i * m + j];
            const double best = std::min({via_del, via_ins, via_sub});
            fd(x, y) = best;
            dist[i * m + j] = best;
          } else {
            const double via_tree =
                fd(ta.leftmost[i] - l1, tb.leftmost[j] - l2) + dist[i * m + j];
            fd(x, y) = std::min({via_del, via_ins, via_tree});
          }
        }
      }
    }
  }
  return dist[n * m - 1];
}

template <EditCostFor<TreeNode> Cost>
double tree_edit_distance(const TableTree& a, const TableTree& b,
                          const Cost& cost) {
  return tree_edit_distance(a.root(), b.root(), cost);
}

// Insert and delete cost 1; substitution costs 0 for structurally and
// textually identical nodes, 1 otherwise.
inline CostModel unit_cost_model() {
  return CostModel{
      [](const TreeNode&) { return 1.0; },
      [](const TreeNode&) { return 1.0; },
      [](const TreeNode& x, const TreeNode& y) {
        return (x.tag == y.tag && x.colspan == y.colspan &&
                x.rowspan == y.rowspan && x.content == y.content)
                   ? 0.0
                   : 1.0;
      }};
}

}  // namespace parsebench
