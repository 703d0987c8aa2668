#ifndef VISCOCAL_MESH_HPP
#define VISCOCAL_MESH_HPP

#include <array>
#include <string>
#include <vector>

namespace viscocal {

/// Structured tetrahedral mesh of the beam [0,Lx] x [0,Ly] x [0,Lz].
/// Each hex cell is split into 6 tets by the Kuhn triangulation (deterministic).
struct BeamMesh {
    double Lx = 0, Ly = 0, Lz = 0;
    int nx = 0, ny = 0, nz = 0;
    std::vector<std::array<double, 3>> nodes;
    std::vector<std::array<int, 4>> tets;           // positive signed volume each
    std::vector<std::array<int, 3>> dirichlet_facets;  // triangles on x = 0
    std::vector<std::array<int, 3>> neumann_facets;    // triangles on x = Lx

    std::size_t node_count() const { return nodes.size(); }
    double total_volume() const;
    std::string to_json() const;  // debug export: nodes, tets, facet tags
};

BeamMesh build_mesh(double Lx, double Ly, double Lz, int nx, int ny, int nz);

} // namespace viscocal

#endif
