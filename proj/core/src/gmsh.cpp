#include "curlspec/gmsh.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>

#include "curlspec/error.hpp"

namespace curlspec {

namespace {

constexpr int kTriangle = 2;
constexpr int kTetrahedron = 4;

// Node counts for the element types a 4.1/2.2 file may carry alongside
// tets; needed to skip elements we do not use.
int nodes_per_element(int type) {
  switch (type) {
    case 1: return 2;    // line
    case 2: return 3;    // triangle
    case 3: return 4;    // quad
    case 4: return 4;    // tet
    case 5: return 8;    // hex
    case 6: return 6;    // prism
    case 7: return 5;    // pyramid
    case 8: return 3;    // line3
    case 9: return 6;    // tri6
    case 11: return 10;  // tet10
    case 15: return 1;   // point
    default: throw ParseError("unsupported Gmsh element type " + std::to_string(type));
  }
}

struct RawMesh {
  std::unordered_map<long, Index> node_index;
  std::vector<Vec3> vertices;
  std::vector<std::array<long, 4>> tets;
  std::vector<std::pair<std::array<long, 3>, int>> triangles;
};

template <class T>
T expect(std::istream& in, const char* what) {
  T value{};
  if (!(in >> value)) throw ParseError(std::string("malformed MSH file while reading ") + what);
  return value;
}

void skip_section(std::istream& in, const std::string& name) {
  const std::string end = "$End" + name.substr(1);
  std::string tok;
  while (in >> tok) {
    if (tok == end) return;
  }
  throw ParseError("unterminated section " + name);
}

void expect_end(std::istream& in, const std::string& end) {
  std::string tok = expect<std::string>(in, end.c_str());
  if (tok != end) throw ParseError("expected " + end + ", found " + tok);
}

void add_node(RawMesh& raw, long tag, const Vec3& x) {
  auto [it, inserted] = raw.node_index.emplace(tag, static_cast<Index>(raw.vertices.size()));
  if (!inserted) throw ParseError("duplicate node tag " + std::to_string(tag));
  raw.vertices.push_back(x);
}

void read_nodes_v2(std::istream& in, RawMesh& raw) {
  const long n = expect<long>(in, "node count");
  for (long i = 0; i < n; ++i) {
    long tag = expect<long>(in, "node tag");
    Vec3 x{expect<double>(in, "x"), expect<double>(in, "y"), expect<double>(in, "z")};
    add_node(raw, tag, x);
  }
  expect_end(in, "$EndNodes");
}

void read_elements_v2(std::istream& in, RawMesh& raw) {
  const long n = expect<long>(in, "element count");
  for (long i = 0; i < n; ++i) {
    expect<long>(in, "element tag");
    const int type = expect<int>(in, "element type");
    const int ntags = expect<int>(in, "tag count");
    int physical = 0;
    for (int t = 0; t < ntags; ++t) {
      int tag = expect<int>(in, "element tag value");
      if (t == 0) physical = tag;
    }
    const int nn = nodes_per_element(type);
    std::array<long, 4> nodes{};
    for (int k = 0; k < nn; ++k) {
      long v = expect<long>(in, "element node");
      if (k < 4) nodes[k] = v;
    }
    if (type == kTetrahedron) raw.tets.push_back(nodes);
    if (type == kTriangle) raw.triangles.push_back({{nodes[0], nodes[1], nodes[2]}, physical});
  }
  expect_end(in, "$EndElements");
}

// Physical tag (first one) per surface entity.
std::map<int, int> read_entities_v4(std::istream& in) {
  std::map<int, int> surface_physical;
  const long np = expect<long>(in, "point entities");
  const long nc = expect<long>(in, "curve entities");
  const long ns = expect<long>(in, "surface entities");
  const long nv = expect<long>(in, "volume entities");
  for (long i = 0; i < np; ++i) {
    expect<int>(in, "point tag");
    for (int k = 0; k < 3; ++k) expect<double>(in, "point coordinate");
    const long nphys = expect<long>(in, "point physical count");
    for (long k = 0; k < nphys; ++k) expect<int>(in, "point physical tag");
  }
  auto read_bounded = [&](bool surface) {
    const int tag = expect<int>(in, "entity tag");
    for (int k = 0; k < 6; ++k) expect<double>(in, "bounding box");
    const long nphys = expect<long>(in, "physical count");
    int first = 0;
    for (long k = 0; k < nphys; ++k) {
      int p = expect<int>(in, "physical tag");
      if (k == 0) first = p;
    }
    const long nb = expect<long>(in, "bounding entity count");
    for (long k = 0; k < nb; ++k) expect<int>(in, "bounding entity");
    if (surface) surface_physical[tag] = first;
  };
  for (long i = 0; i < nc; ++i) read_bounded(false);
  for (long i = 0; i < ns; ++i) read_bounded(true);
  for (long i = 0; i < nv; ++i) read_bounded(false);
  expect_end(in, "$EndEntities");
  return surface_physical;
}

void read_nodes_v4(std::istream& in, RawMesh& raw) {
  const long blocks = expect<long>(in, "node block count");
  expect<long>(in, "node count");
  expect<long>(in, "min node tag");
  expect<long>(in, "max node tag");
  for (long b = 0; b < blocks; ++b) {
    expect<int>(in, "entity dim");
    expect<int>(in, "entity tag");
    const int parametric = expect<int>(in, "parametric flag");
    const long n = expect<long>(in, "nodes in block");
    std::vector<long> tags(static_cast<std::size_t>(n));
    for (auto& t : tags) t = expect<long>(in, "node tag");
    for (long t : tags) {
      Vec3 x{expect<double>(in, "x"), expect<double>(in, "y"), expect<double>(in, "z")};
      if (parametric) throw ParseError("parametric node coordinates are not supported");
      add_node(raw, t, x);
    }
  }
  expect_end(in, "$EndNodes");
}

void read_elements_v4(std::istream& in, RawMesh& raw, const std::map<int, int>& surface_physical) {
  const long blocks = expect<long>(in, "element block count");
  expect<long>(in, "element count");
  expect<long>(in, "min element tag");
  expect<long>(in, "max element tag");
  for (long b = 0; b < blocks; ++b) {
    const int dim = expect<int>(in, "entity dim");
    const int entity = expect<int>(in, "entity tag");
    const int type = expect<int>(in, "element type");
    const long n = expect<long>(in, "elements in block");
    const int nn = nodes_per_element(type);
    int physical = 0;
    if (dim == 2) {
      auto it = surface_physical.find(entity);
      physical = it == surface_physical.end() ? 0 : it->second;
    }
    for (long e = 0; e < n; ++e) {
      expect<long>(in, "element tag");
      std::array<long, 4> nodes{};
      for (int k = 0; k < nn; ++k) {
        long v = expect<long>(in, "element node");
        if (k < 4) nodes[k] = v;
      }
      if (type == kTetrahedron) raw.tets.push_back(nodes);
      if (type == kTriangle) raw.triangles.push_back({{nodes[0], nodes[1], nodes[2]}, physical});
    }
  }
  expect_end(in, "$EndElements");
}

Index lookup(const RawMesh& raw, long tag) {
  auto it = raw.node_index.find(tag);
  if (it == raw.node_index.end()) throw ParseError("element references unknown node " + std::to_string(tag));
  return it->second;
}

}  // namespace

TetMesh read_gmsh(std::istream& in) {
  std::string tok;
  if (!(in >> tok) || tok != "$MeshFormat") throw ParseError("not a Gmsh MSH file (missing $MeshFormat)");
  const std::string version = expect<std::string>(in, "format version");
  const int file_type = expect<int>(in, "file type");
  expect<int>(in, "data size");
  if (file_type != 0) throw ParseError("binary MSH files are not supported");
  bool v4 = false;
  if (version == "4.1") {
    v4 = true;
  } else if (version.rfind("2.", 0) != 0) {
    throw ParseError("unsupported MSH version " + version + " (expected 2.2 or 4.1)");
  }
  expect_end(in, "$EndMeshFormat");

  RawMesh raw;
  std::map<int, int> surface_physical;
  bool have_elements = false;
  while (in >> tok) {
    if (tok == "$Nodes") {
      v4 ? read_nodes_v4(in, raw) : read_nodes_v2(in, raw);
    } else if (tok == "$Elements") {
      v4 ? read_elements_v4(in, raw, surface_physical) : read_elements_v2(in, raw);
      have_elements = true;
    } else if (tok == "$Entities" && v4) {
      surface_physical = read_entities_v4(in);
    } else if (!tok.empty() && tok[0] == '$') {
      skip_section(in, tok);
    } else {
      throw ParseError("unexpected token outside of a section: " + tok);
    }
  }
  if (!have_elements) throw ParseError("missing $Elements section");
  if (raw.tets.empty()) throw ValidationError("no tetrahedra");

  std::vector<std::array<Index, 4>> tets;
  tets.reserve(raw.tets.size());
  for (const auto& t : raw.tets) {
    tets.push_back({lookup(raw, t[0]), lookup(raw, t[1]), lookup(raw, t[2]), lookup(raw, t[3])});
  }
  std::vector<std::pair<std::array<Index, 3>, int>> tags;
  for (const auto& [nodes, physical] : raw.triangles) {
    tags.push_back({{lookup(raw, nodes[0]), lookup(raw, nodes[1]), lookup(raw, nodes[2])}, physical});
  }

  // Nodes not referenced by a tet (e.g. geometry points) are dropped.
  std::vector<Index> remap(raw.vertices.size(), -1);
  for (const auto& t : tets) {
    for (Index v : t) remap[v] = 0;
  }
  std::vector<Vec3> vertices;
  for (std::size_t v = 0; v < raw.vertices.size(); ++v) {
    if (remap[v] == 0) {
      remap[v] = static_cast<Index>(vertices.size());
      vertices.push_back(raw.vertices[v]);
    }
  }
  for (auto& t : tets) {
    for (Index& v : t) v = remap[v];
  }
  for (auto& [nodes, physical] : tags) {
    for (Index& v : nodes) {
      if (remap[v] < 0) throw ValidationError("non-conforming mesh: dangling face (triangle off the tet mesh)");
      v = remap[v];
    }
  }
  TetMesh mesh = TetMesh::from_arrays(std::move(vertices), std::move(tets), tags);
  mesh.descriptor = "gmsh";
  return mesh;
}

TetMesh read_gmsh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  TetMesh mesh = read_gmsh(in);
  mesh.descriptor = "gmsh:" + path.filename().string();
  return mesh;
}

void write_gmsh(const TetMesh& mesh, std::ostream& out, GmshVersion version) {
  out.precision(17);
  const auto vertices = mesh.vertices();
  const auto tets = mesh.tets();
  const auto faces = mesh.boundary_faces();

  if (version == GmshVersion::V22) {
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
    out << "$Nodes\n" << vertices.size() << "\n";
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      out << v + 1 << " " << vertices[v][0] << " " << vertices[v][1] << " " << vertices[v][2] << "\n";
    }
    out << "$EndNodes\n$Elements\n" << faces.size() + tets.size() << "\n";
    std::size_t id = 1;
    for (const auto& f : faces) {
      out << id++ << " 2 2 " << f.region << " " << f.region;
      for (Index v : f.vertices) out << " " << v + 1;
      out << "\n";
    }
    for (const auto& t : tets) {
      out << id++ << " 4 2 0 1";
      for (Index v : t) out << " " << v + 1;
      out << "\n";
    }
    out << "$EndElements\n";
    return;
  }

  // 4.1: one volume entity, one surface entity per region tag.
  std::map<int, std::vector<const BoundaryFace*>> by_region;
  for (const auto& f : faces) by_region[f.region].push_back(&f);
  std::map<int, int> surface_tag;
  int next = 1;
  for (const auto& [region, list] : by_region) surface_tag[region] = next++;

  Vec3 lo = vertices[0], hi = vertices[0];
  for (const auto& v : vertices) {
    for (int d = 0; d < 3; ++d) {
      lo[d] = std::min(lo[d], v[d]);
      hi[d] = std::max(hi[d], v[d]);
    }
  }
  out << "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n";
  out << "$Entities\n0 0 " << by_region.size() << " 1\n";
  for (const auto& [region, list] : by_region) {
    out << surface_tag[region] << " " << lo[0] << " " << lo[1] << " " << lo[2] << " " << hi[0] << " "
        << hi[1] << " " << hi[2] << " 1 " << region << " 0\n";
  }
  out << "1 " << lo[0] << " " << lo[1] << " " << lo[2] << " " << hi[0] << " " << hi[1] << " " << hi[2]
      << " 0 " << by_region.size();
  for (const auto& [region, tag] : surface_tag) out << " " << tag;
  out << "\n$EndEntities\n";

  out << "$Nodes\n1 " << vertices.size() << " 1 " << vertices.size() << "\n";
  out << "3 1 0 " << vertices.size() << "\n";
  for (std::size_t v = 0; v < vertices.size(); ++v) out << v + 1 << "\n";
  for (const auto& v : vertices) out << v[0] << " " << v[1] << " " << v[2] << "\n";
  out << "$EndNodes\n";

  const std::size_t total = faces.size() + tets.size();
  out << "$Elements\n" << by_region.size() + 1 << " " << total << " 1 " << total << "\n";
  std::size_t id = 1;
  for (const auto& [region, list] : by_region) {
    out << "2 " << surface_tag[region] << " 2 " << list.size() << "\n";
    for (const BoundaryFace* f : list) {
      out << id++;
      for (Index v : f->vertices) out << " " << v + 1;
      out << "\n";
    }
  }
  out << "3 1 4 " << tets.size() << "\n";
  for (const auto& t : tets) {
    out << id++;
    for (Index v : t) out << " " << v + 1;
    out << "\n";
  }
  out << "$EndElements\n";
}

void write_gmsh(const TetMesh& mesh, const std::filesystem::path& path, GmshVersion version) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_gmsh(mesh, out, version);
}

}  // namespace curlspec
