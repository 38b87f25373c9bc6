#include "afp/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace afp {

void log_warn(const std::string& msg) {
  std::cerr << "[afp] warning: " << msg << "\n";
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1, u2;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

std::uint64_t derive_seed(std::uint64_t base, const std::string& label,
                          std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  h ^= index + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  // One splitmix round to mix the base in.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (h | 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int Exec::resolve() const {
  if (threads > 0) return threads;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace afp

namespace afp::geom {

void RigidTransform::validate() const {
  const Mat3 gram = rotation.transpose() * rotation;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9)
    throw ValidationError("RigidTransform: rotation is not orthonormal");
  if (std::abs(rotation.determinant() - 1.0) > 1e-9)
    throw ValidationError("RigidTransform: rotation determinant is not +1");
}

RigidTransform rotation_about_axis(const Vec3& axis, double angle_rad) {
  RigidTransform T;
  T.rotation = Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix();
  return T;
}

RigidTransform euler_zyx(double yaw, double pitch, double roll) {
  RigidTransform T;
  T.rotation = (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                Eigen::AngleAxisd(roll, Vec3::UnitX()))
                   .toRotationMatrix();
  return T;
}

double TriMesh::face_area(int f) const {
  const auto& tri = faces[f];
  const Vec3 e1 = vertices[tri[1]] - vertices[tri[0]];
  const Vec3 e2 = vertices[tri[2]] - vertices[tri[0]];
  return 0.5 * e1.cross(e2).norm();
}

Vec3 TriMesh::face_normal(int f) const {
  const auto& tri = faces[f];
  const Vec3 e1 = vertices[tri[1]] - vertices[tri[0]];
  const Vec3 e2 = vertices[tri[2]] - vertices[tri[0]];
  const Vec3 n = e1.cross(e2);
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

double TriMesh::surface_area() const {
  double area = 0.0;
  for (int f = 0; f < int(faces.size()); ++f) area += face_area(f);
  return area;
}

void TriMesh::compute_vertex_normals() {
  normals.assign(vertices.size(), Vec3::Zero());
  for (const auto& tri : faces) {
    const Vec3 e1 = vertices[tri[1]] - vertices[tri[0]];
    const Vec3 e2 = vertices[tri[2]] - vertices[tri[0]];
    const Vec3 n = e1.cross(e2);  // length = 2 * area, so the sum is area-weighted
    for (int k = 0; k < 3; ++k) normals[tri[k]] += n;
  }
  std::vector<int> first_face(vertices.size(), -1);
  for (int f = 0; f < int(faces.size()); ++f)
    for (int k = 0; k < 3; ++k)
      if (first_face[faces[f][k]] < 0) first_face[faces[f][k]] = f;
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    const double len = normals[v].norm();
    if (len > 1e-12) {
      normals[v] /= len;
    } else if (first_face[v] >= 0) {
      normals[v] = face_normal(first_face[v]);
      if (normals[v].isZero()) normals[v] = Vec3::UnitZ();
    } else {
      normals[v] = Vec3::UnitZ();
    }
  }
}

void TriMesh::validate_indices() const {
  if (vertices.empty() || faces.empty())
    throw ValidationError("mesh is empty (no vertices or no faces)");
  const int n = int(vertices.size());
  for (std::size_t f = 0; f < faces.size(); ++f)
    for (int k = 0; k < 3; ++k)
      if (faces[f][k] < 0 || faces[f][k] >= n)
        throw ValidationError("face " + std::to_string(f) +
                              " references out-of-range vertex index " +
                              std::to_string(faces[f][k]) + " (mesh has " +
                              std::to_string(n) + " vertices)");
}

namespace {

// Moeller-Trumbore, returns t along the ray or a negative value on miss.
double ray_triangle(const Vec3& orig, const Vec3& dir, const Vec3& a,
                    const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = dir.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-14) return -1.0;
  const double inv = 1.0 / det;
  const Vec3 s = orig - a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return -1.0;
  const Vec3 q = s.cross(e1);
  const double v = dir.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return -1.0;
  return e2.dot(q) * inv;
}

}  // namespace

bool TriMesh::contains(const Vec3& p) const {
  // Parity of crossings along a fixed slightly-irrational direction; the
  // direction avoids axis-aligned edge/vertex grazings on boxy meshes.
  const Vec3 dir = Vec3(0.57735026919, 0.30151134457, 0.75679643300).normalized();
  int crossings = 0;
  for (const auto& tri : faces) {
    const double t =
        ray_triangle(p, dir, vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
    if (t > 1e-12) ++crossings;
  }
  return (crossings % 2) == 1;
}

TriMesh TriMesh::transformed(const RigidTransform& T) const {
  TriMesh out = *this;
  for (auto& v : out.vertices) v = T.apply_point(v);
  for (auto& n : out.normals) n = T.apply_dir(n);
  return out;
}

TriMesh make_box(const Vec3& h, const Vec3& center) {
  TriMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.push_back(center + Vec3((i & 1) ? h.x() : -h.x(),
                                       (i & 2) ? h.y() : -h.y(),
                                       (i & 4) ? h.z() : -h.z()));
  }
  // Outward-facing windings per face.
  const int quads[6][4] = {
      {0, 2, 3, 1},  // -z
      {4, 5, 7, 6},  // +z
      {0, 1, 5, 4},  // -y
      {2, 6, 7, 3},  // +y
      {0, 4, 6, 2},  // -x
      {1, 3, 7, 5},  // +x
  };
  for (const auto& q : quads) {
    m.faces.push_back({q[0], q[1], q[2]});
    m.faces.push_back({q[0], q[2], q[3]});
  }
  m.compute_vertex_normals();
  return m;
}

TriMesh make_uv_sphere(double radius, int n_lat, int n_lon, const Vec3& center) {
  TriMesh m;
  for (int i = 0; i <= n_lat; ++i) {
    const double theta = M_PI * double(i) / n_lat;
    for (int j = 0; j < n_lon; ++j) {
      const double phi = 2.0 * M_PI * double(j) / n_lon;
      m.vertices.push_back(center + radius * Vec3(std::sin(theta) * std::cos(phi),
                                                  std::sin(theta) * std::sin(phi),
                                                  std::cos(theta)));
    }
  }
  auto vid = [&](int i, int j) { return i * n_lon + (j % n_lon); };
  for (int i = 0; i < n_lat; ++i) {
    for (int j = 0; j < n_lon; ++j) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1),
                d = vid(i, j + 1);
      if (i > 0) m.faces.push_back({a, b, d});
      if (i + 1 < n_lat) m.faces.push_back({b, c, d});
    }
  }
  m.compute_vertex_normals();
  return m;
}

// ---------------------------------------------------------------------------
// SurfacePointSet
// ---------------------------------------------------------------------------

void SurfacePointSet::validate() const {
  if (points.size() != normals.size())
    throw ValidationError("SurfacePointSet: points/normals length mismatch");
  for (std::size_t i = 0; i < normals.size(); ++i)
    if (std::abs(normals[i].norm() - 1.0) > 1e-6)
      throw ValidationError("SurfacePointSet: normal " + std::to_string(i) +
                            " is not unit length");
}

SurfacePointSet apply_rigid(const SurfacePointSet& set, const RigidTransform& T) {
  SurfacePointSet out;
  out.source = set.source;
  out.points.reserve(set.points.size());
  out.normals.reserve(set.normals.size());
  for (const auto& p : set.points) out.points.push_back(T.apply_point(p));
  for (const auto& n : set.normals) out.normals.push_back(T.apply_dir(n));
  return out;
}

// ---------------------------------------------------------------------------
// Mask
// ---------------------------------------------------------------------------

Mask::Mask(int w, int h, std::uint8_t fill) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw ValidationError("Mask: dimensions must be > 0");
  bits.assign(std::size_t(w) * h, fill);
}

std::size_t Mask::count() const {
  std::size_t n = 0;
  for (auto b : bits) n += b ? 1 : 0;
  return n;
}

double mask_iou(const Mask& a, const Mask& b) {
  if (a.width != b.width || a.height != b.height)
    throw ValidationError("mask_iou: dimension mismatch");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    const bool pa = a.bits[i] != 0, pb = b.bits[i] != 0;
    inter += (pa && pb) ? 1 : 0;
    uni += (pa || pb) ? 1 : 0;
  }
  return uni == 0 ? 0.0 : double(inter) / double(uni);
}

void save_mask_pgm(const Mask& mask, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
  std::vector<std::uint8_t> row(mask.width);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) row[x] = mask.at(x, y) ? 255 : 0;
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
}

Mask load_mask_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw ParseError(path + ": not a P5 PGM (magic '" + magic + "')");
  auto next_int = [&]() {
    // Skips whitespace and '#' comments.
    for (;;) {
      int c = in.peek();
      if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    int v;
    if (!(in >> v)) throw ParseError(path + ": truncated PGM header");
    return v;
  };
  const int w = next_int(), h = next_int(), maxval = next_int();
  if (maxval != 255) throw ParseError(path + ": PGM maxval must be 255");
  in.get();  // single whitespace after header
  Mask mask(w, h);
  std::vector<std::uint8_t> row(w);
  for (int y = 0; y < h; ++y) {
    in.read(reinterpret_cast<char*>(row.data()), w);
    if (!in) throw ParseError(path + ": truncated PGM payload at row " +
                              std::to_string(y));
    for (int x = 0; x < w; ++x) mask.set(x, y, row[x] == 255 ? 1 : 0);
  }
  return mask;
}

}  // namespace afp::geom
