#pragma once

// Discrete phase space: the torus Z_N x Z_N, domains on it and their
// geometry. A lattice point carries measure w = 1/N and one lattice step has
// length l = 1/sqrt(N), so w == l*l and the whole torus has measure N.

#include <qha/errors.hpp>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace qha {

struct LatticePoint {
  int m = 0; ///< time index
  int n = 0; ///< frequency index
  auto operator<=>(const LatticePoint &) const = default;
};

/// Representative of i mod N in [0, N).
inline int wrap_index(long long i, int N) {
  long long r = i % N;
  return static_cast<int>(r < 0 ? r + N : r);
}

/// Representative of i mod N in [-N/2, N/2); for even N the tie N/2 maps to -N/2.
inline int minimal_image(long long i, int N) {
  int r = wrap_index(i, N);
  return (2 * r >= N) ? r - N : r;
}

class PhaseLattice {
public:
  explicit PhaseLattice(int N) : N_(N) {
    if (N < 1)
      throw BadArgument("lattice size must be positive, got " + std::to_string(N));
  }

  int N() const noexcept { return N_; }
  /// Number of lattice points, N^2.
  std::size_t size() const noexcept { return static_cast<std::size_t>(N_) * N_; }
  double weight() const noexcept { return 1.0 / N_; }
  double unit() const noexcept { return 1.0 / std::sqrt(static_cast<double>(N_)); }
  /// Total measure of the torus (= N).
  double total_measure() const noexcept { return size() * weight(); }

  std::size_t index(int m, int n) const noexcept {
    return static_cast<std::size_t>(wrap_index(m, N_)) * N_ + wrap_index(n, N_);
  }
  std::size_t index(LatticePoint z) const noexcept { return index(z.m, z.n); }
  LatticePoint point(std::size_t idx) const noexcept {
    return {static_cast<int>(idx / N_), static_cast<int>(idx % N_)};
  }

  bool operator==(const PhaseLattice &) const = default;

private:
  int N_;
};

/// Euclidean distance of the minimal-image difference, in length units.
inline double torus_distance(LatticePoint a, LatticePoint b, const PhaseLattice &lat) {
  const double dm = minimal_image(static_cast<long long>(a.m) - b.m, lat.N());
  const double dn = minimal_image(static_cast<long long>(a.n) - b.n, lat.N());
  return lat.unit() * std::hypot(dm, dn);
}

/// A subset of the lattice, stored as a dense membership mask.
class Domain {
public:
  explicit Domain(PhaseLattice lat) : lat_(lat), mask_(lat.size(), false) {}

  Domain(PhaseLattice lat, const std::vector<LatticePoint> &points) : Domain(lat) {
    for (auto p : points) {
      if (p.m < 0 || p.m >= lat.N() || p.n < 0 || p.n >= lat.N())
        throw BadArgument("domain point (" + std::to_string(p.m) + "," +
                          std::to_string(p.n) + ") outside the lattice");
      insert(p);
    }
  }

  static Domain full(PhaseLattice lat) {
    Domain d(lat);
    std::fill(d.mask_.begin(), d.mask_.end(), true);
    return d;
  }

  const PhaseLattice &lattice() const noexcept { return lat_; }

  bool contains(int m, int n) const noexcept { return mask_[lat_.index(m, n)]; }
  bool contains(LatticePoint z) const noexcept { return mask_[lat_.index(z)]; }
  bool contains_index(std::size_t idx) const noexcept { return mask_[idx]; }

  void insert(LatticePoint z) { mask_[lat_.index(z)] = true; }

  std::size_t count() const noexcept {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), true));
  }
  bool empty() const noexcept { return count() == 0; }

  /// Member points in lexicographic (m, n) order.
  std::vector<LatticePoint> points() const {
    std::vector<LatticePoint> out;
    for (std::size_t i = 0; i < mask_.size(); ++i)
      if (mask_[i])
        out.push_back(lat_.point(i));
    return out;
  }

  Domain complement() const {
    Domain c(lat_);
    for (std::size_t i = 0; i < mask_.size(); ++i)
      c.mask_[i] = !mask_[i];
    return c;
  }

  bool is_subset_of(const Domain &other) const {
    for (std::size_t i = 0; i < mask_.size(); ++i)
      if (mask_[i] && !other.mask_[i])
        return false;
    return true;
  }

  bool operator==(const Domain &) const = default;

private:
  PhaseLattice lat_;
  std::vector<bool> mask_;
};

/// Lebesgue measure of the domain: w times the number of points.
inline double measure(const Domain &d) {
  return d.lattice().weight() * static_cast<double>(d.count());
}

/// Discrete total variation of the indicator: l times the number of
/// 4-neighbour edges of the periodic lattice that cross the boundary.
inline double perimeter(const Domain &d) {
  const int N = d.lattice().N();
  std::size_t edges = 0;
  for (int m = 0; m < N; ++m)
    for (int n = 0; n < N; ++n) {
      const bool in = d.contains(m, n);
      edges += (in != d.contains(m + 1, n));
      edges += (in != d.contains(m, n + 1));
    }
  return d.lattice().unit() * static_cast<double>(edges);
}

// ---------------------------------------------------------------------------
// Shapes. Coordinates are in length units, i.e. lattice index times l.

struct Ball {
  double cx = 0, cy = 0;
  double radius = 1;
};

struct Rectangle {
  double x0 = 0, y0 = 0; ///< lower-left corner
  double wx = 1, wy = 1; ///< side lengths
};

struct ExplicitMask {
  std::vector<LatticePoint> points;
};

class ShapeSpec {
public:
  using Kind = std::variant<Ball, Rectangle, ExplicitMask>;

  static ShapeSpec ball(double cx, double cy, double radius) {
    if (!(radius >= 0) || !std::isfinite(radius))
      throw BadArgument("ball radius must be non-negative");
    return ShapeSpec(Ball{cx, cy, radius});
  }
  static ShapeSpec rectangle(double x0, double y0, double wx, double wy) {
    if (!(wx > 0) || !(wy > 0))
      throw BadArgument("rectangle widths must be positive");
    return ShapeSpec(Rectangle{x0, y0, wx, wy});
  }
  static ShapeSpec explicit_mask(std::vector<LatticePoint> points) {
    return ShapeSpec(ExplicitMask{std::move(points)});
  }

  const Kind &kind() const noexcept { return kind_; }
  bool is_ball() const noexcept { return std::holds_alternative<Ball>(kind_); }

private:
  explicit ShapeSpec(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// Lattice points strictly inside the shape dilated by `scale` about its
/// centre. Offsets from the centre are taken in the minimal image, so the
/// dilated shape must fit inside one period of the torus.
inline Domain rasterize(const ShapeSpec &shape, double scale, const PhaseLattice &lat) {
  if (!(scale > 0) || !std::isfinite(scale))
    throw BadArgument("scale must be positive");
  const double l = lat.unit();
  const double extent = lat.N() * l;
  const int N = lat.N();

  // Offset of index i from centre c (length units), reduced to [-extent/2, extent/2).
  auto offset = [&](int i, double c) {
    double d = std::fmod(i * l - c, extent);
    if (d < -extent / 2)
      d += extent;
    else if (d >= extent / 2)
      d -= extent;
    return d;
  };

  Domain out(lat);
  std::visit(
      [&](const auto &s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          const double r = s.radius * scale;
          if (2 * r >= extent)
            throw ShapeTooLarge("ball diameter " + std::to_string(2 * r) +
                                " does not fit in torus extent " + std::to_string(extent));
          for (int m = 0; m < N; ++m)
            for (int n = 0; n < N; ++n) {
              const double dx = offset(m, s.cx), dy = offset(n, s.cy);
              if (dx * dx + dy * dy < r * r)
                out.insert({m, n});
            }
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          const double hx = 0.5 * s.wx * scale, hy = 0.5 * s.wy * scale;
          if (2 * hx >= extent || 2 * hy >= extent)
            throw ShapeTooLarge("rectangle does not fit in torus extent " +
                                std::to_string(extent));
          const double cx = s.x0 + 0.5 * s.wx, cy = s.y0 + 0.5 * s.wy;
          for (int m = 0; m < N; ++m)
            for (int n = 0; n < N; ++n)
              if (std::abs(offset(m, cx)) < hx && std::abs(offset(n, cy)) < hy)
                out.insert({m, n});
        } else {
          if (scale != 1.0)
            throw BadArgument("explicit masks cannot be dilated");
          out = Domain(lat, s.points);
        }
      },
      shape.kind());
  return out;
}

} // namespace qha
