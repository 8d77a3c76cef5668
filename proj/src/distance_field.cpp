#include "blowbot/distance_field.hpp"

#include <array>
#include <functional>
#include <queue>

namespace blowbot {
namespace {

struct Step {
  int dr;
  int dc;
  bool diagonal;
};

// Row-major neighbour order, so scanning it visits neighbours by ascending flat index.
constexpr std::array<Step, 8> kNeighbours{{{-1, -1, true},
                                           {-1, 0, false},
                                           {-1, 1, true},
                                           {0, -1, false},
                                           {0, 1, false},
                                           {1, -1, true},
                                           {1, 0, false},
                                           {1, 1, true}}};

bool passable(Occupancy v, UnknownAs unknown_as) {
  return v == Occupancy::Free || (v == Occupancy::Unknown && unknown_as == UnknownAs::Free);
}

}  // namespace

double DistanceField::sample(const Vec2& p) const {
  const double gx = p.x() / resolution - 0.5;
  const double gy = p.y() / resolution - 0.5;
  const int c0 = static_cast<int>(std::floor(gx));
  const int r0 = static_cast<int>(std::floor(gy));
  const double fx = gx - c0;
  const double fy = gy - r0;
  double acc = 0.0;
  double weight = 0.0;
  for (int dr = 0; dr <= 1; ++dr) {
    for (int dc = 0; dc <= 1; ++dc) {
      const int r = std::clamp(r0 + dr, 0, static_cast<int>(distance.rows()) - 1);
      const int c = std::clamp(c0 + dc, 0, static_cast<int>(distance.cols()) - 1);
      const double v = distance(r, c);
      if (!std::isfinite(v)) continue;
      const double w = (dr ? fy : 1.0 - fy) * (dc ? fx : 1.0 - fx);
      acc += w * v;
      weight += w;
    }
  }
  if (weight > 0.0) return acc / weight;
  // Degenerate weights (exactly on a finite corner with zero weight elsewhere).
  const Cell nearest{std::clamp(static_cast<int>(std::floor(p.y() / resolution)), 0, static_cast<int>(distance.rows()) - 1),
                     std::clamp(static_cast<int>(std::floor(p.x() / resolution)), 0, static_cast<int>(distance.cols()) - 1)};
  return at(nearest);
}

DistanceField distance_field(const Grid<Occupancy>& occupancy, std::span<const Cell> sources, UnknownAs unknown_as,
                             double resolution) {
  const int rows = static_cast<int>(occupancy.rows());
  const int cols = static_cast<int>(occupancy.cols());
  DistanceField field{Grid<double>::Constant(rows, cols, kInfinity), resolution};
  const double axial = resolution;
  const double diagonal = resolution * std::numbers::sqrt2;

  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  for (const Cell& s : sources) {
    if (s.row < 0 || s.row >= rows || s.col < 0 || s.col >= cols) continue;
    if (!passable(occupancy(s.row, s.col), unknown_as)) continue;
    field.distance(s.row, s.col) = 0.0;
    open.emplace(0.0, s.row * cols + s.col);
  }

  double* dist = field.distance.data();
  while (!open.empty()) {
    const auto [d, index] = open.top();
    open.pop();
    if (d > dist[index]) continue;
    const int r = index / cols;
    const int c = index % cols;
    for (const Step& s : kNeighbours) {
      const int rr = r + s.dr;
      const int cc = c + s.dc;
      if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
      if (!passable(occupancy(rr, cc), unknown_as)) continue;
      const double candidate = d + (s.diagonal ? diagonal : axial);
      const int n = rr * cols + cc;
      if (candidate < dist[n]) {
        dist[n] = candidate;
        open.emplace(candidate, n);
      }
    }
  }
  return field;
}

Path plan_path(const Grid<Occupancy>& occupancy, const Cell& from, const Cell& to, double resolution) {
  Grid<Occupancy> occ = occupancy;
  occ(from.row, from.col) = Occupancy::Free;
  const int rows = static_cast<int>(occ.rows());
  const int cols = static_cast<int>(occ.cols());

  Cell goal = to;
  DistanceField field = distance_field(occ, std::span<const Cell>(&goal, 1), UnknownAs::Occupied, resolution);
  if (!field.reachable(from)) {
    // Fall back to the reachable cell nearest the requested target.
    const DistanceField reach = distance_field(occ, std::span<const Cell>(&from, 1), UnknownAs::Occupied, resolution);
    long best = -1;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (!std::isfinite(reach.distance(r, c))) continue;
        const long dr = r - to.row;
        const long dc = c - to.col;
        const long d2 = dr * dr + dc * dc;
        if (best < 0 || d2 < best) {
          best = d2;
          goal = {r, c};
        }
      }
    }
    field = distance_field(occ, std::span<const Cell>(&goal, 1), UnknownAs::Occupied, resolution);
  }

  Path path{from};
  Cell cur = from;
  while (field.at(cur) > 0.0) {
    Cell next = cur;
    double best = field.at(cur);
    for (const Step& s : kNeighbours) {
      const Cell n{cur.row + s.dr, cur.col + s.dc};
      if (n.row < 0 || n.row >= rows || n.col < 0 || n.col >= cols) continue;
      if (field.at(n) < best) {
        best = field.at(n);
        next = n;
      }
    }
    if (next == cur) fault("plan_path: distance field has a local minimum");
    path.push_back(next);
    cur = next;
  }
  return path;
}

}  // namespace blowbot
