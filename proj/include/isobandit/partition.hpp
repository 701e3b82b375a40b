#pragma once

#include <cmath>
#include <iosfwd>
#include <limits>
#include <vector>

#include "isobandit/kernels.hpp"

namespace isobandit {

struct Observation {
  Point x;
  double y = 0.0;
};

/// Axis-aligned dyadic cube [lower, lower + side) per axis, closed on axes
/// where it touches 1.
struct Cell {
  int id = 0;
  int depth = 0;
  Point lower;
  Point center;
  double side = 1.0;  // r_E = 2^{-depth}
  std::vector<Observation> data;
  double u0 = std::numeric_limits<double>::infinity();

  bool contains(const Point& x) const;
  double volume() const;
  double diameter() const { return std::sqrt(static_cast<double>(center.size())) * side; }
};

struct CellStats {
  std::size_t count = 0;
  double mean = std::numeric_limits<double>::quiet_NaN();  // NaN when empty
};

CellStats cell_stats(const Cell& cell);

class Partition {
 public:
  static constexpr int kMaxDepth = 20;

  /// The single root cell [0,1]^d with id 0.
  explicit Partition(int dim);

  int dim() const { return dim_; }
  /// Leaves in increasing id order.
  const std::vector<Cell>& leaves() const { return leaves_; }
  const Cell& cell(int id) const;
  Cell& cell(int id);
  bool has(int id) const;

  /// The leaf containing x. Throws std::out_of_range outside [0,1]^d.
  int locate(const Point& x) const;

  /// Replaces a leaf with its 2^d children, reassigning its data by
  /// containment and giving each child u0 = child_u0. Returns the child ids
  /// in lexicographic order of their lower corners, or an empty list (with a
  /// warning) when the leaf is already at kMaxDepth. Throws
  /// std::out_of_range for unknown ids.
  std::vector<int> split(int id, double child_u0);
  std::vector<int> split(int id);

  /// Locates x and stores the observation; returns the cell id.
  int add_observation(const Point& x, double y);

  double volume_sum() const;
  std::size_t observation_count() const;

  /// One leaf per line: depth center... count u0.
  void write_snapshot(std::ostream& os) const;

 private:
  std::size_t index_of(int id) const;

  int dim_;
  int next_id_ = 1;
  std::vector<Cell> leaves_;
};

}  // namespace isobandit
