#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "curlspec/mesh.hpp"

namespace curlspec {

// {descriptor, vertices:[[x,y,z]...], tets:[[i,j,k,l]...],
//  boundary_faces:[{vertices:[i,j,k], normal:[nx,ny,nz], region}...]}
nlohmann::json mesh_to_json(const TetMesh& mesh);
TetMesh mesh_from_json(const nlohmann::json& j);

void write_mesh_json(const TetMesh& mesh, const std::filesystem::path& path);
TetMesh read_mesh_json(const std::filesystem::path& path);

// Compact serialization; identical meshes give identical strings.
std::string serialize_mesh(const TetMesh& mesh);

}  // namespace curlspec
