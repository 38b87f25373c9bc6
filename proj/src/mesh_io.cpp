#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include "afp/geometry.hpp"

namespace afp::geom {

namespace {

TriMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open: " + path);
  TriMesh mesh;
  std::string line;
  int line_no = 0;
  std::vector<Vec3> file_normals;
  bool normals_indexed = false;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z))
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": malformed vertex record");
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "vn") {
      double x, y, z;
      if (!(ss >> x >> y >> z))
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": malformed normal record");
      file_normals.emplace_back(x, y, z);
    } else if (tag == "f") {
      // Accept v, v/vt, v//vn, v/vt/vn; polygons are fan-triangulated.
      std::vector<int> poly;
      std::string item;
      while (ss >> item) {
        const std::size_t slash = item.find('/');
        const std::string head = item.substr(0, slash);
        int idx;
        try {
          idx = std::stoi(head);
        } catch (const std::exception&) {
          throw ParseError(path + ":" + std::to_string(line_no) +
                           ": malformed face index '" + item + "'");
        }
        if (idx < 0) idx = int(mesh.vertices.size()) + idx;  // negative = relative
        else idx -= 1;                                       // OBJ is 1-based
        poly.push_back(idx);
        if (slash != std::string::npos &&
            item.find("//") != std::string::npos)
          normals_indexed = true;
      }
      if (poly.size() < 3)
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": face with fewer than 3 vertices");
      for (std::size_t k = 2; k < poly.size(); ++k)
        mesh.faces.push_back({poly[0], poly[int(k) - 1], poly[int(k)]});
    }
    // vt, mtllib, usemtl, o, g, s: ignored.
  }
  (void)normals_indexed;
  if (mesh.vertices.empty() || mesh.faces.empty())
    throw ValidationError(path + ": mesh is empty (no vertices or no faces)");
  mesh.validate_indices();
  if (file_normals.size() == mesh.vertices.size()) {
    mesh.normals = file_normals;
    for (auto& n : mesh.normals) {
      const double len = n.norm();
      n = len > 1e-12 ? Vec3(n / len) : Vec3::UnitZ();
    }
  } else {
    mesh.compute_vertex_normals();
  }
  return mesh;
}

struct PlyProperty {
  std::string type;       // scalar type, or list count type
  std::string list_type;  // list element type ("" for scalars)
  std::string name;
  bool is_list = false;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

std::size_t scalar_size(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" ||
      t == "float32")
    return 4;
  if (t == "double" || t == "float64") return 8;
  throw ParseError("unknown PLY scalar type '" + t + "'");
}

double read_binary_scalar(std::istream& in, const std::string& t) {
  unsigned char buf[8];
  const std::size_t n = scalar_size(t);
  in.read(reinterpret_cast<char*>(buf), std::streamsize(n));
  if (!in) throw ParseError("truncated PLY payload at byte offset " +
                            std::to_string(std::size_t(in.tellg())));
  // Assumes a little-endian host, which matches binary_little_endian files.
  auto as = [&](auto v) {
    std::memcpy(&v, buf, sizeof(v));
    return double(v);
  };
  if (t == "char" || t == "int8") return as(std::int8_t{});
  if (t == "uchar" || t == "uint8") return as(std::uint8_t{});
  if (t == "short" || t == "int16") return as(std::int16_t{});
  if (t == "ushort" || t == "uint16") return as(std::uint16_t{});
  if (t == "int" || t == "int32") return as(std::int32_t{});
  if (t == "uint" || t == "uint32") return as(std::uint32_t{});
  if (t == "float" || t == "float32") return as(float{});
  return as(double{});
}

TriMesh load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw ParseError(path + ": missing 'ply' magic");

  bool binary = false;
  std::vector<PlyElement> elements;
  int line_no = 1;
  for (;;) {
    if (!std::getline(in, line))
      throw ParseError(path + ": header ended before 'end_header'");
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "comment" || tag == "obj_info") continue;
    if (tag == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt == "binary_little_endian") binary = true;
      else if (fmt == "ascii") binary = false;
      else
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": unsupported PLY format '" + fmt + "'");
    } else if (tag == "element") {
      PlyElement e;
      ss >> e.name >> e.count;
      elements.push_back(e);
    } else if (tag == "property") {
      if (elements.empty())
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": property before any element");
      PlyProperty p;
      std::string t;
      ss >> t;
      if (t == "list") {
        p.is_list = true;
        ss >> p.type >> p.list_type >> p.name;
      } else {
        p.type = t;
        ss >> p.name;
      }
      elements.back().props.push_back(p);
    } else if (tag == "end_header") {
      break;
    } else {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": unknown header record '" + tag + "'");
    }
  }

  TriMesh mesh;
  std::vector<Vec3> file_normals;
  bool has_normals = false;

  auto read_scalar = [&](const std::string& type) -> double {
    if (binary) return read_binary_scalar(in, type);
    double v;
    if (!(in >> v)) throw ParseError(path + ": truncated ascii PLY payload");
    return v;
  };

  for (const auto& elem : elements) {
    if (elem.name == "vertex") {
      int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1;
      for (int k = 0; k < int(elem.props.size()); ++k) {
        const auto& name = elem.props[k].name;
        if (name == "x") ix = k;
        else if (name == "y") iy = k;
        else if (name == "z") iz = k;
        else if (name == "nx") inx = k;
        else if (name == "ny") iny = k;
        else if (name == "nz") inz = k;
      }
      if (ix < 0 || iy < 0 || iz < 0)
        throw ParseError(path + ": vertex element lacks x/y/z properties");
      has_normals = inx >= 0 && iny >= 0 && inz >= 0;
      std::vector<double> row(elem.props.size());
      for (std::size_t v = 0; v < elem.count; ++v) {
        for (int k = 0; k < int(elem.props.size()); ++k) {
          if (elem.props[k].is_list)
            throw ParseError(path + ": list property on vertex element");
          row[k] = read_scalar(elem.props[k].type);
        }
        mesh.vertices.emplace_back(row[ix], row[iy], row[iz]);
        if (has_normals) file_normals.emplace_back(row[inx], row[iny], row[inz]);
      }
    } else if (elem.name == "face") {
      for (std::size_t f = 0; f < elem.count; ++f) {
        for (const auto& p : elem.props) {
          if (!p.is_list) {
            read_scalar(p.type);
            continue;
          }
          const int n = int(read_scalar(p.type));
          std::vector<int> poly(n);
          for (int k = 0; k < n; ++k) poly[k] = int(read_scalar(p.list_type));
          if (p.name == "vertex_indices" || p.name == "vertex_index") {
            if (n < 3)
              throw ParseError(path + ": face " + std::to_string(f) +
                               " has fewer than 3 vertices");
            for (int k = 2; k < n; ++k)
              mesh.faces.push_back({poly[0], poly[k - 1], poly[k]});
          }
        }
      }
    } else {
      // Skip unknown elements record by record.
      for (std::size_t r = 0; r < elem.count; ++r) {
        for (const auto& p : elem.props) {
          if (p.is_list) {
            const int n = int(read_scalar(p.type));
            for (int k = 0; k < n; ++k) read_scalar(p.list_type);
          } else {
            read_scalar(p.type);
          }
        }
      }
    }
  }
  if (mesh.vertices.empty() || mesh.faces.empty())
    throw ValidationError(path + ": mesh is empty (no vertices or no faces)");
  mesh.validate_indices();
  if (has_normals && file_normals.size() == mesh.vertices.size()) {
    mesh.normals = file_normals;
    for (auto& n : mesh.normals) {
      const double len = n.norm();
      n = len > 1e-12 ? Vec3(n / len) : Vec3::UnitZ();
    }
  } else {
    mesh.compute_vertex_normals();
  }
  return mesh;
}

bool has_suffix(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() &&
         std::equal(suf.rbegin(), suf.rend(), s.rbegin(), [](char a, char b) {
           return std::tolower(a) == std::tolower(b);
         });
}

}  // namespace

TriMesh load_mesh(const std::string& path) {
  if (has_suffix(path, ".obj")) return load_obj(path);
  if (has_suffix(path, ".ply")) return load_ply(path);
  throw ValidationError(path + ": unsupported mesh format (expected .obj or .ply)");
}

void save_mesh_ply(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << mesh.vertices.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  const bool with_normals = mesh.normals.size() == mesh.vertices.size();
  if (with_normals)
    out << "property float nx\nproperty float ny\nproperty float nz\n";
  out << "element face " << mesh.faces.size() << "\n";
  out << "property list uchar int vertex_indices\n";
  out << "end_header\n";
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    float row[6] = {float(mesh.vertices[v].x()), float(mesh.vertices[v].y()),
                    float(mesh.vertices[v].z()), 0.f, 0.f, 0.f};
    if (with_normals) {
      row[3] = float(mesh.normals[v].x());
      row[4] = float(mesh.normals[v].y());
      row[5] = float(mesh.normals[v].z());
    }
    out.write(reinterpret_cast<const char*>(row),
              std::streamsize((with_normals ? 6 : 3) * sizeof(float)));
  }
  for (const auto& f : mesh.faces) {
    const std::uint8_t n = 3;
    out.write(reinterpret_cast<const char*>(&n), 1);
    const std::int32_t idx[3] = {f[0], f[1], f[2]};
    out.write(reinterpret_cast<const char*>(idx), sizeof(idx));
  }
}

void save_points_ply(const SurfacePointSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << set.points.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  out << "property double nx\nproperty double ny\nproperty double nz\n";
  out << "comment source " << (set.source.empty() ? "-" : set.source) << "\n";
  out << "end_header\n";
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    double row[6] = {set.points[i].x(),  set.points[i].y(),  set.points[i].z(),
                     set.normals[i].x(), set.normals[i].y(), set.normals[i].z()};
    out.write(reinterpret_cast<const char*>(row), sizeof(row));
  }
}

SurfacePointSet load_points_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw ParseError(path + ": missing 'ply' magic");
  std::size_t count = 0;
  std::string source;
  for (;;) {
    if (!std::getline(in, line))
      throw ParseError(path + ": header ended before 'end_header'");
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "element") {
      std::string name;
      ss >> name >> count;
    } else if (tag == "comment") {
      std::string what;
      ss >> what;
      if (what == "source") ss >> source;
    } else if (tag == "end_header") {
      break;
    }
  }
  SurfacePointSet set;
  set.source = source == "-" ? "" : source;
  for (std::size_t i = 0; i < count; ++i) {
    double row[6];
    in.read(reinterpret_cast<char*>(row), sizeof(row));
    if (!in) throw ParseError(path + ": truncated point payload");
    set.points.emplace_back(row[0], row[1], row[2]);
    set.normals.emplace_back(row[3], row[4], row[5]);
  }
  set.validate();
  return set;
}

}  // namespace afp::geom
