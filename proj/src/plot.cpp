#include "geobern/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace geobern {

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// One linear crossing along a cell edge.
Eigen::Vector2d edge_point(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double va,
                           double vb, double level) {
  const double t = (level - va) / (vb - va);
  return a + std::clamp(t, 0.0, 1.0) * (b - a);
}

using Segment = std::pair<Eigen::Vector2d, Eigen::Vector2d>;

std::vector<Segment> cell_segments(const std::array<Eigen::Vector2d, 4>& corner,
                                   const std::array<double, 4>& value, double level) {
  // Corner order: 0 bottom-left, 1 bottom-right, 2 top-right, 3 top-left.
  // Edge order: 0 bottom, 1 right, 2 top, 3 left.
  static constexpr int kEdgeCorners[4][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  int idx = 0;
  for (int c = 0; c < 4; ++c)
    if (value[c] > level) idx |= 1 << c;
  if (idx == 0 || idx == 15) return {};

  auto on_edge = [&](int e) {
    const int a = kEdgeCorners[e][0];
    const int b = kEdgeCorners[e][1];
    return edge_point(corner[a], corner[b], value[a], value[b], level);
  };

  // Edge pairs per case; saddles (5, 10) disambiguated by the cell mean.
  static constexpr int kPairs[16][4] = {
      {-1, -1, -1, -1}, {3, 0, -1, -1}, {0, 1, -1, -1}, {3, 1, -1, -1},
      {1, 2, -1, -1},   {-2, 0, 0, 0},  {0, 2, -1, -1}, {3, 2, -1, -1},
      {2, 3, -1, -1},   {2, 0, -1, -1}, {-2, 0, 0, 0},  {2, 1, -1, -1},
      {1, 3, -1, -1},   {1, 0, -1, -1}, {0, 3, -1, -1}, {-1, -1, -1, -1}};

  if (kPairs[idx][0] == -2) {  // saddle
    const double center = (value[0] + value[1] + value[2] + value[3]) / 4.0;
    const bool center_high = center > level;
    if (idx == 5) {  // corners 0 and 2 high
      if (center_high) return {{on_edge(3), on_edge(2)}, {on_edge(0), on_edge(1)}};
      return {{on_edge(3), on_edge(0)}, {on_edge(2), on_edge(1)}};
    }
    // idx == 10: corners 1 and 3 high
    if (center_high) return {{on_edge(0), on_edge(3)}, {on_edge(1), on_edge(2)}};
    return {{on_edge(0), on_edge(1)}, {on_edge(3), on_edge(2)}};
  }

  std::vector<Segment> segs;
  segs.push_back({on_edge(kPairs[idx][0]), on_edge(kPairs[idx][1])});
  return segs;
}

std::vector<std::vector<Eigen::Vector2d>> chain_segments(const std::vector<Segment>& segments,
                                                         double tolerance) {
  using Key = std::pair<long long, long long>;
  auto key_of = [tolerance](const Eigen::Vector2d& p) {
    return Key{std::llround(p.x() / tolerance), std::llround(p.y() / tolerance)};
  };
  std::multimap<Key, std::size_t> by_end;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    by_end.insert({key_of(segments[i].first), i});
    by_end.insert({key_of(segments[i].second), i});
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<std::vector<Eigen::Vector2d>> chains;

  auto take_next = [&](const Eigen::Vector2d& tip) -> int {
    auto [lo, hi] = by_end.equal_range(key_of(tip));
    for (auto it = lo; it != hi; ++it)
      if (!used[it->second]) return static_cast<int>(it->second);
    return -1;
  };

  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    std::vector<Eigen::Vector2d> chain{segments[i].first, segments[i].second};
    for (;;) {  // grow forward
      const int j = take_next(chain.back());
      if (j < 0) break;
      used[j] = true;
      const auto& seg = segments[j];
      chain.push_back((seg.first - chain.back()).norm() < (seg.second - chain.back()).norm()
                          ? seg.second
                          : seg.first);
    }
    for (;;) {  // grow backward
      const int j = take_next(chain.front());
      if (j < 0) break;
      used[j] = true;
      const auto& seg = segments[j];
      chain.insert(chain.begin(),
                   (seg.first - chain.front()).norm() < (seg.second - chain.front()).norm()
                       ? seg.second
                       : seg.first);
    }
    chains.push_back(std::move(chain));
  }
  return chains;
}

}  // namespace

std::string surface_grid_csv(const GaussianField& field, const Eigen::Vector2d& lower,
                             const Eigen::Vector2d& upper, int resolution) {
  if (field.dimension() != 2)
    throw std::invalid_argument("surface_grid_csv: 2D fields only");
  if (resolution < 2) throw std::invalid_argument("surface_grid_csv: resolution must be >= 2");
  const bool with_curvature = field.obstacles().size() == 1;
  std::ostringstream csv;
  csv << (with_curvature ? "x,y,f,g,kg\n" : "x,y,f,g\n");
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      Eigen::Vector2d p(lower.x() + (upper.x() - lower.x()) * i / (resolution - 1),
                        lower.y() + (upper.y() - lower.y()) * j / (resolution - 1));
      csv << num(p.x()) << ',' << num(p.y()) << ',' << num(field.value(p)) << ','
          << num(field.metric(p));
      if (with_curvature) csv << ',' << num(gaussian_curvature_2d(field, p));
      csv << '\n';
    }
  }
  return csv.str();
}

std::vector<std::vector<Eigen::Vector2d>> extract_level_set(const GaussianField& field,
                                                            double level,
                                                            const Eigen::Vector2d& lower,
                                                            const Eigen::Vector2d& upper,
                                                            int resolution) {
  if (field.dimension() != 2)
    throw std::invalid_argument("extract_level_set: 2D fields only");
  if (resolution < 2) throw std::invalid_argument("extract_level_set: resolution must be >= 2");

  std::vector<double> xs(resolution), ys(resolution);
  for (int i = 0; i < resolution; ++i) {
    xs[i] = lower.x() + (upper.x() - lower.x()) * i / (resolution - 1);
    ys[i] = lower.y() + (upper.y() - lower.y()) * i / (resolution - 1);
  }
  Eigen::MatrixXd values(resolution, resolution);
  for (int j = 0; j < resolution; ++j)
    for (int i = 0; i < resolution; ++i) values(i, j) = field.value(Eigen::Vector2d(xs[i], ys[j]));

  std::vector<Segment> segments;
  for (int j = 0; j + 1 < resolution; ++j) {
    for (int i = 0; i + 1 < resolution; ++i) {
      const std::array<Eigen::Vector2d, 4> corner = {
          Eigen::Vector2d(xs[i], ys[j]), Eigen::Vector2d(xs[i + 1], ys[j]),
          Eigen::Vector2d(xs[i + 1], ys[j + 1]), Eigen::Vector2d(xs[i], ys[j + 1])};
      const std::array<double, 4> value = {values(i, j), values(i + 1, j), values(i + 1, j + 1),
                                           values(i, j + 1)};
      for (auto& seg : cell_segments(corner, value, level)) segments.push_back(seg);
    }
  }
  const double cell = std::max((upper - lower).x(), (upper - lower).y()) / (resolution - 1);
  return chain_segments(segments, cell * 1e-6);
}

std::string trajectory_svg(const Trajectory& trajectory, const GaussianField& field, double rho) {
  if (field.dimension() != 2 || trajectory.positions.rows() != 2)
    throw std::invalid_argument("trajectory_svg: 2D trajectories only");

  Eigen::Vector2d lower = trajectory.positions.rowwise().minCoeff();
  Eigen::Vector2d upper = trajectory.positions.rowwise().maxCoeff();
  for (const Obstacle& obs : field.obstacles()) {
    lower = lower.cwiseMin(Eigen::Vector2d(obs.center) - Eigen::Vector2d::Constant(obs.radius));
    upper = upper.cwiseMax(Eigen::Vector2d(obs.center) + Eigen::Vector2d::Constant(obs.radius));
  }
  const Eigen::Vector2d pad = 0.1 * (upper - lower).cwiseMax(1e-6);
  lower -= pad;
  upper += pad;

  constexpr double kViewport = 600.0;
  const double scale = kViewport / std::max((upper - lower).x(), (upper - lower).y());
  auto to_px = [&](const Eigen::Vector2d& p) {
    return Eigen::Vector2d((p.x() - lower.x()) * scale, (upper.y() - p.y()) * scale);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kViewport << ' '
      << kViewport << "\">\n";

  const auto level = extract_level_set(field, rho, lower, upper, 160);
  for (const auto& chain : level) {
    svg << "  <polyline class=\"levelset\" fill=\"none\" stroke=\"#c88\" points=\"";
    for (const auto& p : chain) {
      const Eigen::Vector2d px = to_px(p);
      svg << num(px.x()) << ',' << num(px.y()) << ' ';
    }
    svg << "\"/>\n";
  }

  for (const Obstacle& obs : field.obstacles()) {
    const Eigen::Vector2d c = to_px(Eigen::Vector2d(obs.center));
    svg << "  <circle class=\"obstacle\" cx=\"" << num(c.x()) << "\" cy=\"" << num(c.y())
        << "\" r=\"" << num(obs.radius * scale) << "\" fill=\"#ddd\" stroke=\"#555\"/>\n";
  }

  svg << "  <path class=\"trajectory\" fill=\"none\" stroke=\"#06c\" stroke-width=\"2\" d=\"";
  for (Eigen::Index i = 0; i < trajectory.positions.cols(); ++i) {
    const Eigen::Vector2d px = to_px(trajectory.positions.col(i));
    svg << (i == 0 ? 'M' : 'L') << px.x() << ' ' << px.y() << ' ';
  }
  svg << "\"/>\n";

  for (Eigen::Index k = 0; k < trajectory.knot_positions.cols(); ++k) {
    const Eigen::Vector2d px = to_px(trajectory.knot_positions.col(k));
    svg << "  <rect class=\"knot\" x=\"" << num(px.x() - 2.5) << "\" y=\"" << num(px.y() - 2.5)
        << "\" width=\"5\" height=\"5\" fill=\"#06c\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string trajectory_csv(const Trajectory& trajectory, const GaussianField& field) {
  const int dim = static_cast<int>(trajectory.positions.rows());
  std::ostringstream csv;
  csv << "t,x,y" << (dim == 3 ? ",z" : "") << ",vx,vy" << (dim == 3 ? ",vz" : "") << ",f\n";
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    csv << num(trajectory.times[i]);
    for (int d = 0; d < dim; ++d) csv << ',' << num(trajectory.positions(d, i));
    for (int d = 0; d < dim; ++d) csv << ',' << num(trajectory.velocities(d, i));
    csv << ',' << num(field.value(trajectory.positions.col(i))) << '\n';
  }
  return csv.str();
}

}  // namespace geobern
