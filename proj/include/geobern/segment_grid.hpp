#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

namespace geobern {

/// Time grid t_0 < t_1 < ... < t_K shared by all segments of a composite
/// polynomial. Segment s (0-based, s = 0 .. K-1) spans [knot(s), knot(s+1)];
/// t_K is the final mission time.
class SegmentGrid {
 public:
  explicit SegmentGrid(std::vector<double> knot_times) : knots_(std::move(knot_times)) {
    if (knots_.size() < 2) throw std::invalid_argument("SegmentGrid: need at least one segment");
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      if (!(knots_[i] > knots_[i - 1]))
        throw std::invalid_argument("SegmentGrid: knot times must be strictly increasing");
    }
  }

  static SegmentGrid uniform(double t0, double tf, int segments) {
    if (segments < 1) throw std::invalid_argument("SegmentGrid: segments must be >= 1");
    if (!(tf > t0)) throw std::invalid_argument("SegmentGrid: tf must exceed t0");
    std::vector<double> knots(segments + 1);
    for (int k = 0; k <= segments; ++k)
      knots[k] = t0 + (tf - t0) * static_cast<double>(k) / segments;
    knots.back() = tf;
    return SegmentGrid(std::move(knots));
  }

  int segments() const { return static_cast<int>(knots_.size()) - 1; }
  double t0() const { return knots_.front(); }
  double tf() const { return knots_.back(); }
  double horizon() const { return tf() - t0(); }
  double knot(int k) const { return knots_.at(static_cast<std::size_t>(k)); }
  double duration(int s) const { return knots_[s + 1] - knots_[s]; }
  const std::vector<double>& knots() const { return knots_; }

  /// Segment containing t; knots belong to the segment on their right except
  /// t_K, which belongs to the last segment. Out-of-range t is clamped.
  int segment_of(double t) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    int s = static_cast<int>(it - knots_.begin()) - 1;
    return std::clamp(s, 0, segments() - 1);
  }

  bool operator==(const SegmentGrid& other) const { return knots_ == other.knots_; }

 private:
  std::vector<double> knots_;
};

}  // namespace geobern
