#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "vlpr/image.hpp"

namespace vlpr {

/// 8-connected labeling. Label 0 is background; labels 1..count are numbered in
/// raster order of each component's first pixel. boxes[i] and areas[i] describe
/// label i + 1.
struct ComponentLabeling {
  int width = 0;
  int height = 0;
  std::vector<int> labels;
  int count = 0;
  std::vector<Rect> boxes;
  std::vector<std::size_t> areas;

  int at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }

  /// Binary mask of a single label, cropped to its box.
  BinaryImage component_mask(int label) const {
    const Rect& b = boxes.at(static_cast<std::size_t>(label - 1));
    BinaryImage out(b.width, b.height);
    for (int y = 0; y < b.height; ++y)
      for (int x = 0; x < b.width; ++x) out.set(x, y, at(b.x + x, b.y + y) == label);
    return out;
  }
};

namespace detail {

struct DisjointSet {
  std::vector<int> parent;

  int make() {
    parent.push_back(static_cast<int>(parent.size()));
    return static_cast<int>(parent.size()) - 1;
  }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[b] = a;
    else parent[a] = b;
  }
};

}  // namespace detail

/// Two-pass union-find labeling followed by a raster-order relabel.
inline ComponentLabeling connected_components(const BinaryImage& img) {
  ComponentLabeling out;
  out.width = img.width();
  out.height = img.height();
  out.labels.assign(img.size(), 0);
  if (img.empty()) return out;

  const int w = img.width(), h = img.height();
  detail::DisjointSet sets;
  sets.make();  // provisional label 0 is background

  std::vector<int>& lab = out.labels;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!img.get(x, y)) continue;
      // Already-visited neighbors: W, NW, N, NE.
      int nb[4];
      int n = 0;
      if (x > 0 && lab[y * w + x - 1]) nb[n++] = lab[y * w + x - 1];
      if (y > 0) {
        if (x > 0 && lab[(y - 1) * w + x - 1]) nb[n++] = lab[(y - 1) * w + x - 1];
        if (lab[(y - 1) * w + x]) nb[n++] = lab[(y - 1) * w + x];
        if (x + 1 < w && lab[(y - 1) * w + x + 1]) nb[n++] = lab[(y - 1) * w + x + 1];
      }
      if (n == 0) {
        lab[y * w + x] = sets.make();
        continue;
      }
      int m = nb[0];
      for (int i = 1; i < n; ++i) m = std::min(m, nb[i]);
      lab[y * w + x] = m;
      for (int i = 0; i < n; ++i) sets.unite(m, nb[i]);
    }
  }

  std::vector<int> final_label(sets.parent.size(), 0);
  for (std::size_t i = 0; i < lab.size(); ++i) {
    if (!lab[i]) continue;
    const int root = sets.find(lab[i]);
    if (!final_label[root]) {
      final_label[root] = ++out.count;
      const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
      out.boxes.push_back({x, y, 1, 1});
      out.areas.push_back(0);
    }
    const int l = final_label[root];
    lab[i] = l;
    const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
    Rect& b = out.boxes[l - 1];
    const int x0 = std::min(b.x, x), y0 = std::min(b.y, y);
    const int x1 = std::max(b.right(), x + 1), y1 = std::max(b.bottom(), y + 1);
    b = {x0, y0, x1 - x0, y1 - y0};
    ++out.areas[l - 1];
  }
  return out;
}

}  // namespace vlpr
