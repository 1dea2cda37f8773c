#pragma once

#include <filesystem>
#include <iosfwd>

#include "curlspec/mesh.hpp"

namespace curlspec {

enum class GmshVersion { V22, V41 };

// ASCII MSH 2.2 / 4.1: nodes, 4-node tets (type 4) and 3-node triangles
// (type 2). Triangle physical tags become boundary region tags; other element
// types are skipped. Throws ParseError for format problems and
// ValidationError for mesh-level problems (no tets, dangling faces).
TetMesh read_gmsh(const std::filesystem::path& path);
TetMesh read_gmsh(std::istream& in);

// Writes tets and boundary triangles (physical tag = region).
void write_gmsh(const TetMesh& mesh, std::ostream& out, GmshVersion version = GmshVersion::V22);
void write_gmsh(const TetMesh& mesh, const std::filesystem::path& path,
                GmshVersion version = GmshVersion::V22);

}  // namespace curlspec
