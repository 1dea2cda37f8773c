#include "curlspec/mesh_json.hpp"

#include <fstream>

#include "curlspec/error.hpp"

namespace curlspec {

nlohmann::json mesh_to_json(const TetMesh& mesh) {
  nlohmann::json j;
  j["descriptor"] = mesh.descriptor;
  auto& verts = j["vertices"] = nlohmann::json::array();
  for (const auto& v : mesh.vertices()) verts.push_back({v[0], v[1], v[2]});
  auto& tets = j["tets"] = nlohmann::json::array();
  for (const auto& t : mesh.tets()) tets.push_back({t[0], t[1], t[2], t[3]});
  auto& faces = j["boundary_faces"] = nlohmann::json::array();
  for (const auto& f : mesh.boundary_faces()) {
    faces.push_back({{"vertices", {f.vertices[0], f.vertices[1], f.vertices[2]}},
                     {"normal", {f.normal[0], f.normal[1], f.normal[2]}},
                     {"region", f.region}});
  }
  return j;
}

TetMesh mesh_from_json(const nlohmann::json& j) {
  try {
    std::vector<Vec3> vertices;
    for (const auto& v : j.at("vertices")) vertices.push_back({v.at(0), v.at(1), v.at(2)});
    std::vector<std::array<Index, 4>> tets;
    for (const auto& t : j.at("tets")) tets.push_back({t.at(0), t.at(1), t.at(2), t.at(3)});
    std::vector<std::pair<std::array<Index, 3>, int>> tags;
    if (j.contains("boundary_faces")) {
      for (const auto& f : j["boundary_faces"]) {
        const auto& fv = f.at("vertices");
        tags.push_back({{fv.at(0), fv.at(1), fv.at(2)}, f.value("region", 0)});
      }
    }
    TetMesh mesh = TetMesh::from_arrays(std::move(vertices), std::move(tets), tags);
    mesh.descriptor = j.value("descriptor", std::string{});
    return mesh;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed mesh JSON: ") + e.what());
  }
}

void write_mesh_json(const TetMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_mesh(mesh) << "\n";
}

TetMesh read_mesh_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed mesh JSON: ") + e.what());
  }
  return mesh_from_json(j);
}

std::string serialize_mesh(const TetMesh& mesh) { return mesh_to_json(mesh).dump(); }

}  // namespace curlspec
