#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "afp/common.hpp"

namespace afp::geom {

/// Rigid motion x -> R x + t with R orthonormal, det(R) = +1.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  Vec3 apply_point(const Vec3& x) const { return rotation * x + translation; }
  Vec3 apply_dir(const Vec3& n) const { return rotation * n; }

  RigidTransform inverse() const {
    RigidTransform inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(rotation.transpose() * translation);
    return inv;
  }

  /// this ∘ other (apply `other` first).
  RigidTransform compose(const RigidTransform& other) const {
    RigidTransform out;
    out.rotation = rotation * other.rotation;
    out.translation = rotation * other.translation + translation;
    return out;
  }

  /// Throws ValidationError unless R is orthonormal with det +1 (1e-9).
  void validate() const;
};

RigidTransform rotation_about_axis(const Vec3& axis, double angle_rad);
RigidTransform euler_zyx(double yaw, double pitch, double roll);

/// Triangle mesh with per-vertex unit normals. Not required to be watertight;
/// interior queries (point containment) assume a closed surface and say so.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<Vec3> normals;  // per-vertex, unit; computed on load if absent

  double surface_area() const;
  Vec3 face_normal(int f) const;  // unit, zero for degenerate faces
  double face_area(int f) const;

  /// Area-weighted average of incident face normals, renormalized. Vertices
  /// whose accumulated normal vanishes fall back to the first incident face
  /// normal (or +z when isolated).
  void compute_vertex_normals();

  /// Throws ValidationError on out-of-range face indices or an empty mesh.
  void validate_indices() const;

  /// Closed-surface containment test by ray-crossing parity. Precondition:
  /// the mesh is watertight.
  bool contains(const Vec3& p) const;

  TriMesh transformed(const RigidTransform& T) const;
};

TriMesh make_box(const Vec3& half_extents, const Vec3& center = Vec3::Zero());
TriMesh make_uv_sphere(double radius, int n_lat = 16, int n_lon = 32,
                       const Vec3& center = Vec3::Zero());

/// Loads an OBJ (`v`/`f` records) or PLY (ascii or binary_little_endian)
/// mesh, validating indices and filling in vertex normals when missing.
TriMesh load_mesh(const std::string& path);
void save_mesh_ply(const TriMesh& mesh, const std::string& path);

/// Ordered surface samples; index i refers to the same material point across
/// rigid transforms of the set.
struct SurfacePointSet {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::string source;

  std::size_t size() const { return points.size(); }
  void validate() const;  // |points| == |normals|, unit normals (1e-6)
};

SurfacePointSet apply_rigid(const SurfacePointSet& set,
                            const RigidTransform& T);

void save_points_ply(const SurfacePointSet& set, const std::string& path);
SurfacePointSet load_points_ply(const std::string& path);

// ---------------------------------------------------------------------------
// Poisson-disk surface sampling.
//
// Greedy conflict rejection over a seeded, area-stratified candidate stream.
// Every accepted point is at least the current target radius away from all
// prior ones; the target starts at 0.9 x r_ideal and relaxes stepwise down to
// the 0.7 x r_ideal quality floor, where r_ideal = sqrt(area / (count * pi)).
// If the budget runs out below the floor the remainder is filled by plain
// stratified samples and a warning is logged.
// ---------------------------------------------------------------------------

struct PoissonDiskResult {
  SurfacePointSet set;
  std::vector<int> face_index;       // triangle each point lies on
  std::vector<Vec3> barycentric;     // coordinates within -that face
  bool relaxed = false;              // spacing floor was abandoned
  double min_spacing = 0.0;          // achieved min pairwise distance
};

PoissonDiskResult poisson_disk_sample_full(const TriMesh& mesh, int count,
                                           std::uint64_t seed);
SurfacePointSet poisson_disk_sample(const TriMesh& mesh, int count,
                                    std::uint64_t seed);

// ---------------------------------------------------------------------------
// Binary raster.
// ---------------------------------------------------------------------------

struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // row-major, 0 or 1

  Mask() = default;
  Mask(int w, int h, std::uint8_t fill = 0);

  std::uint8_t at(int x, int y) const { return bits[std::size_t(y) * width + x]; }
  void set(int x, int y, std::uint8_t v) { bits[std::size_t(y) * width + x] = v; }

  std::size_t count() const;
  bool empty_raster() const { return count() == 0; }
};

double mask_iou(const Mask& a, const Mask& b);

/// PGM (P5) round trip; byte 255 encodes true, 0 false — bit-exact.
void save_mask_pgm(const Mask& mask, const std::string& path);
Mask load_mask_pgm(const std::string& path);

}  // namespace afp::geom
