#include "isobandit/partition.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <stdexcept>

#include "isobandit/errors.hpp"

namespace isobandit {

bool Cell::contains(const Point& x) const {
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double lo = lower[k];
    const double hi = lower[k] + side;
    if (x[k] < lo) return false;
    if (hi >= 1.0 ? x[k] > 1.0 : x[k] >= hi) return false;
  }
  return true;
}

double Cell::volume() const { return std::pow(side, static_cast<double>(lower.size())); }

CellStats cell_stats(const Cell& cell) {
  CellStats s;
  s.count = cell.data.size();
  if (s.count == 0) return s;
  double acc = 0.0;
  for (const auto& o : cell.data) acc += o.y;
  s.mean = acc / static_cast<double>(s.count);
  return s;
}

Partition::Partition(int dim) : dim_(dim) {
  if (dim < 1) throw ConfigError("partition: dim must be >= 1");
  Cell root;
  root.id = 0;
  root.depth = 0;
  root.lower = Point::Zero(dim);
  root.center = Point::Constant(dim, 0.5);
  root.side = 1.0;
  leaves_.push_back(std::move(root));
}

std::size_t Partition::index_of(int id) const {
  const auto it = std::lower_bound(leaves_.begin(), leaves_.end(), id,
                                   [](const Cell& c, int key) { return c.id < key; });
  if (it == leaves_.end() || it->id != id) throw std::out_of_range("partition: unknown cell id");
  return static_cast<std::size_t>(it - leaves_.begin());
}

bool Partition::has(int id) const {
  const auto it = std::lower_bound(leaves_.begin(), leaves_.end(), id,
                                   [](const Cell& c, int key) { return c.id < key; });
  return it != leaves_.end() && it->id == id;
}

const Cell& Partition::cell(int id) const { return leaves_[index_of(id)]; }
Cell& Partition::cell(int id) { return leaves_[index_of(id)]; }

int Partition::locate(const Point& x) const {
  if (x.size() != dim_) throw std::invalid_argument("partition: point dimension mismatch");
  for (Eigen::Index k = 0; k < x.size(); ++k)
    if (!(x[k] >= 0.0 && x[k] <= 1.0)) throw std::out_of_range("partition: point outside [0,1]^d");
  for (const auto& c : leaves_)
    if (c.contains(x)) return c.id;
  throw std::logic_error("partition: no leaf contains the point");
}

std::vector<int> Partition::split(int id) { return split(id, cell(id).u0); }

std::vector<int> Partition::split(int id, double child_u0) {
  const std::size_t at = index_of(id);
  if (leaves_[at].depth >= kMaxDepth) {
    std::cerr << "warning: partition: cell " << id << " is at the depth cap; split ignored\n";
    return {};
  }
  Cell parent = std::move(leaves_[at]);
  leaves_.erase(leaves_.begin() + static_cast<std::ptrdiff_t>(at));

  const double half = parent.side / 2.0;
  const std::size_t n_children = std::size_t{1} << dim_;
  std::vector<Cell> children(n_children);
  std::vector<int> ids;
  ids.reserve(n_children);
  for (std::size_t b = 0; b < n_children; ++b) {
    Cell& c = children[b];
    c.depth = parent.depth + 1;
    c.side = half;
    c.lower = parent.lower;
    for (int k = 0; k < dim_; ++k)
      if ((b >> (dim_ - 1 - k)) & 1U) c.lower[k] += half;
    c.center = c.lower.array() + half / 2.0;
    c.u0 = child_u0;
    c.id = next_id_++;
    ids.push_back(c.id);
  }
  for (auto& o : parent.data) {
    for (auto& c : children) {
      if (c.contains(o.x)) {
        c.data.push_back(std::move(o));
        break;
      }
    }
  }
  for (auto& c : children) leaves_.push_back(std::move(c));
  return ids;
}

int Partition::add_observation(const Point& x, double y) {
  const int id = locate(x);
  cell(id).data.push_back({x, y});
  return id;
}

double Partition::volume_sum() const {
  double acc = 0.0;
  for (const auto& c : leaves_) acc += c.volume();
  return acc;
}

std::size_t Partition::observation_count() const {
  std::size_t n = 0;
  for (const auto& c : leaves_) n += c.data.size();
  return n;
}

void Partition::write_snapshot(std::ostream& os) const {
  os << std::setprecision(17);
  for (const auto& c : leaves_) {
    os << c.depth;
    for (Eigen::Index k = 0; k < c.center.size(); ++k) os << ' ' << c.center[k];
    os << ' ' << c.data.size() << ' ' << c.u0 << '\n';
  }
}

}  // namespace isobandit
