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
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "garmentkit/geometry.hpp"

namespace garmentkit {

struct Neighbor {
  std::int64_t index = -1;
  double squared_distance = 0.0;
};

/// Exact nearest-neighbor index over a fixed point set. Among equidistant
/// points the lowest index wins. Queries are const and thread-safe.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::span<const Vec3> points, int leaf_size = 8);

  std::size_t size() const { return points_.size(); }
  const std::vector<Vec3>& points() const { return points_; }

  /// Throws InvariantError on an empty tree.
  Neighbor nearest(const Vec3& q) const;

 private:
  struct Node {
    std::int32_t begin = 0, end = 0;
    std::int32_t left = -1, right = -1;
    int axis = 0;
    double split = 0.0;
  };

  std::int32_t build(std::int32_t begin, std::int32_t end);
  void search(std::int32_t node, const Vec3& q, Neighbor& best) const;

  std::vector<Vec3> points_;
  std::vector<std::int32_t> order_;
  std::vector<Node> nodes_;
  int leaf_size_ = 8;
};

}  // namespace garmentkit
