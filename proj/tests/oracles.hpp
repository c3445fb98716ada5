#pragma once

// Reference implementations used only by tests. Each one is written the slow,
// obvious way and shares no code with the library beyond the image types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vlpr/image.hpp"

namespace oracle {

using vlpr::BinaryImage;

inline BinaryImage random_binary(std::mt19937_64& rng, int w, int h, double density) {
  std::bernoulli_distribution on(density);
  BinaryImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.set(x, y, on(rng));
  return img;
}

/// Random blob: union of a few filled disks and rectangles.
inline BinaryImage random_blobs(std::mt19937_64& rng, int w, int h, int shapes) {
  BinaryImage img(w, h);
  std::uniform_int_distribution<int> px(0, w - 1), py(0, h - 1), rad(1, std::max(2, std::min(w, h) / 4));
  for (int s = 0; s < shapes; ++s) {
    const int cx = px(rng), cy = py(rng), r = rad(rng);
    const bool disk = rng() % 2 == 0;
    for (int y = std::max(0, cy - r); y <= std::min(h - 1, cy + r); ++y)
      for (int x = std::max(0, cx - r); x <= std::min(w - 1, cx + r); ++x)
        if (!disk || (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) img.set(x, y);
  }
  return img;
}

/// Breadth-first 8-connected flood fill; labels in raster order of first pixel.
inline std::vector<int> flood_fill_labels(const BinaryImage& img, int* count = nullptr) {
  const int w = img.width(), h = img.height();
  std::vector<int> lab(static_cast<std::size_t>(w) * h, 0);
  int next = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!img.get(x, y) || lab[y * w + x]) continue;
      ++next;
      std::deque<std::pair<int, int>> q{{x, y}};
      lab[y * w + x] = next;
      while (!q.empty()) {
        auto [cx, cy] = q.front();
        q.pop_front();
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (!img.get(nx, ny) || lab[ny * w + nx]) continue;
            lab[ny * w + nx] = next;
            q.push_back({nx, ny});
          }
      }
    }
  if (count) *count = next;
  return lab;
}

/// True when both labelings put exactly the same pixels together.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] == 0) != (b[i] == 0)) return false;
    if (a[i] == 0) continue;
    auto [it1, new1] = ab.emplace(a[i], b[i]);
    auto [it2, new2] = ba.emplace(b[i], a[i]);
    if (it1->second != b[i] || it2->second != a[i]) return false;
  }
  return true;
}

/// 3x3 square element, pixels beyond the image are background.
inline BinaryImage naive_erode(const BinaryImage& img) {
  BinaryImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      bool all = true;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          const bool inside = nx >= 0 && ny >= 0 && nx < img.width() && ny < img.height();
          if (!inside || !img.get(nx, ny)) all = false;
        }
      out.set(x, y, all);
    }
  return out;
}

inline BinaryImage naive_dilate(const BinaryImage& img) {
  BinaryImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      bool any = false;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx >= 0 && ny >= 0 && nx < img.width() && ny < img.height() && img.get(nx, ny)) any = true;
        }
      out.set(x, y, any);
    }
  return out;
}

/// Between-class variance of splitting `values` at level t (foreground > t).
inline double between_class_variance(const std::vector<int>& values, int t) {
  double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
  for (int v : values) {
    if (v > t) {
      n1 += 1;
      s1 += v;
    } else {
      n0 += 1;
      s0 += v;
    }
  }
  if (n0 == 0 || n1 == 0) return 0.0;
  const double n = n0 + n1, m0 = s0 / n0, m1 = s1 / n1;
  return (n0 / n) * (n1 / n) * (m0 - m1) * (m0 - m1);
}

/// Textbook hexcone conversion in floating point; hue in [0,1).
struct Hsv {
  double h, s, v;
};

inline Hsv hsv(int r8, int g8, int b8) {
  const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
  if (mx == mn) return {0.0, 0.0, mx};
  const double s = (mx - mn) / mx;
  const double rc = (mx - r) / (mx - mn), gc = (mx - g) / (mx - mn), bc = (mx - b) / (mx - mn);
  double h;
  if (r == mx) h = bc - gc;
  else if (g == mx) h = 2.0 + rc - bc;
  else h = 4.0 + gc - rc;
  h = std::fmod(h / 6.0, 1.0);
  if (h < 0) h += 1.0;
  return {h, s, mx};
}

inline double sum_of_squares_distance(const std::vector<double>& a, const std::vector<double>& b) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double d = static_cast<long double>(a[i]) - static_cast<long double>(b[i]);
    acc += d * d;
  }
  return static_cast<double>(std::sqrt(acc));
}

struct Stored {
  std::vector<double> x;
  std::string label;
};

/// Exhaustive k-NN: sort every stored sample by (distance, alphabet rank),
/// vote over the first k, break vote ties by mean distance then rank.
inline std::string knn_label(const std::vector<Stored>& train, const std::vector<std::string>& alphabet, int k,
                             const std::vector<double>& q) {
  auto rank = [&](const std::string& l) {
    return static_cast<int>(std::find(alphabet.begin(), alphabet.end(), l) - alphabet.begin());
  };
  std::vector<std::pair<double, int>> scan;  // (squared distance, rank)
  for (const auto& s : train) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const long double d = static_cast<long double>(q[i]) - static_cast<long double>(s.x[i]);
      acc += d * d;
    }
    scan.push_back({static_cast<double>(acc), rank(s.label)});
  }
  std::sort(scan.begin(), scan.end());
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(k), scan.size());
  std::map<int, std::pair<int, double>> votes;  // rank -> (count, distance sum)
  for (std::size_t i = 0; i < n; ++i) {
    auto& v = votes[scan[i].second];
    v.first += 1;
    v.second += std::sqrt(scan[i].first);
  }
  int best = -1;
  int best_count = -1;
  double best_mean = 0.0;
  for (const auto& [r, v] : votes) {
    const double mean = v.second / v.first;
    if (v.first > best_count || (v.first == best_count && mean < best_mean)) {
      best = r;
      best_count = v.first;
      best_mean = mean;
    }
  }
  return alphabet[static_cast<std::size_t>(best)];
}

/// Foreground / background changes along one row of gray samples; negative
/// samples are skipped.
inline int scanline_jumps(const std::vector<int>& row, int threshold) {
  std::vector<int> bits;
  for (int g : row)
    if (g >= 0) bits.push_back(g > threshold);
  int n = 0;
  for (std::size_t i = 1; i < bits.size(); ++i) n += bits[i] != bits[i - 1];
  return n;
}

/// Foreground pixels 4-adjacent to the background region that reaches the
/// image border (4-connected background, outside counts as background).
inline std::set<std::pair<int, int>> outer_border_pixels(const BinaryImage& img) {
  const int w = img.width() + 2, h = img.height() + 2;
  auto fg = [&](int x, int y) { return x >= 1 && y >= 1 && x < w - 1 && y < h - 1 && img.get(x - 1, y - 1); };
  std::vector<char> outside(static_cast<std::size_t>(w) * h, 0);
  std::deque<std::pair<int, int>> q{{0, 0}};
  outside[0] = 1;
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop_front();
    const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    for (int i = 0; i < 4; ++i) {
      const int nx = x + dx[i], ny = y + dy[i];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h || outside[ny * w + nx] || fg(nx, ny)) continue;
      outside[ny * w + nx] = 1;
      q.push_back({nx, ny});
    }
  }
  std::set<std::pair<int, int>> out;
  for (int y = 1; y < h - 1; ++y)
    for (int x = 1; x < w - 1; ++x) {
      if (!fg(x, y)) continue;
      if (outside[y * w + x - 1] || outside[y * w + x + 1] || outside[(y - 1) * w + x] || outside[(y + 1) * w + x])
        out.insert({x - 1, y - 1});
    }
  return out;
}

}  // namespace oracle
