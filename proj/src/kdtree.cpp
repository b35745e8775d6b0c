// Copyright 2026 The garmentkit Authors.
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

#include "garmentkit/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace garmentkit {

KdTree::KdTree(std::span<const Vec3> points, int leaf_size)
    : points_(points.begin(), points.end()), leaf_size_(std::max(1, leaf_size)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!points_.empty()) build(0, static_cast<std::int32_t>(points_.size()));
}

std::int32_t KdTree::build(std::int32_t begin, std::int32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({begin, end, -1, -1, 0, 0.0});
  if (end - begin <= leaf_size_) return id;

  Aabb box;
  for (std::int32_t i = begin; i < end; ++i) box.extend(points_[order_[i]]);
  int axis = 0;
  box.extent().maxCoeff(&axis);
  const std::int32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::int32_t a, std::int32_t b) {
                     const double pa = points_[a][axis], pb = points_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  const double split = points_[order_[mid]][axis];
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

Neighbor KdTree::nearest(const Vec3& q) const {
  if (points_.empty()) throw InvariantError("nearest-neighbor query on an empty point set");
  Neighbor best{-1, std::numeric_limits<double>::infinity()};
  search(0, q, best);
  return best;
}

void KdTree::search(std::int32_t id, const Vec3& q, Neighbor& best) const {
  const Node& node = nodes_[id];
  if (node.left < 0) {
    for (std::int32_t i = node.begin; i < node.end; ++i) {
      const std::int32_t p = order_[i];
      const double d2 = (points_[p] - q).squaredNorm();
      if (d2 < best.squared_distance || (d2 == best.squared_distance && p < best.index))
        best = {p, d2};
    }
    return;
  }
  const double delta = q[node.axis] - node.split;
  const std::int32_t near = delta < 0.0 ? node.left : node.right;
  const std::int32_t far = delta < 0.0 ? node.right : node.left;
  search(near, q, best);
  // Equal distance is still visited so the lowest-index tie can be found.
  if (delta * delta <= best.squared_distance) search(far, q, best);
}

}  // namespace garmentkit
