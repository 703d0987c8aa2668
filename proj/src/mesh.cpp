#include "viscocal/mesh.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace viscocal {

namespace {

double tet_volume(const BeamMesh& m, const std::array<int, 4>& t) {
    const auto& a = m.nodes[std::size_t(t[0])];
    const auto& b = m.nodes[std::size_t(t[1])];
    const auto& c = m.nodes[std::size_t(t[2])];
    const auto& d = m.nodes[std::size_t(t[3])];
    const double u[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const double v[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
    const double w[3] = {d[0] - a[0], d[1] - a[1], d[2] - a[2]};
    return (u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) +
            u[2] * (v[0] * w[1] - v[1] * w[0])) / 6.0;
}

} // namespace

double BeamMesh::total_volume() const {
    double vol = 0.0;
    for (const auto& t : tets) vol += tet_volume(*this, t);
    return vol;
}

BeamMesh build_mesh(double Lx, double Ly, double Lz, int nx, int ny, int nz) {
    if (!(Lx > 0 && Ly > 0 && Lz > 0)) throw std::invalid_argument("build_mesh: dimensions must be positive");
    if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("build_mesh: subdivisions must be >= 1");

    BeamMesh m;
    m.Lx = Lx; m.Ly = Ly; m.Lz = Lz;
    m.nx = nx; m.ny = ny; m.nz = nz;

    m.nodes.reserve(std::size_t(nx + 1) * std::size_t(ny + 1) * std::size_t(nz + 1));
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i)
                m.nodes.push_back({Lx * double(i) / nx, Ly * double(j) / ny, Lz * double(k) / nz});

    auto nid = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };

    // Kuhn split: 6 tets per hex, one per monotone lattice path (0,0,0) -> (1,1,1)
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                for (const auto& p : perms) {
                    int c[3] = {i, j, k};
                    std::array<int, 4> tet{};
                    tet[0] = nid(c[0], c[1], c[2]);
                    for (int step = 0; step < 3; ++step) {
                        ++c[p[step]];
                        tet[std::size_t(step) + 1] = nid(c[0], c[1], c[2]);
                    }
                    if (tet_volume(m, tet) < 0.0) std::swap(tet[2], tet[3]);
                    m.tets.push_back(tet);
                }

    // boundary triangles on the clamped (x=0) and loaded (x=Lx) faces
    auto on_plane = [&](int node, double x) { return std::abs(m.nodes[std::size_t(node)][0] - x) < 1e-12 * Lx; };
    static const int faces[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    for (const auto& t : m.tets)
        for (const auto& f : faces) {
            const std::array<int, 3> tri = {t[std::size_t(f[0])], t[std::size_t(f[1])], t[std::size_t(f[2])]};
            if (on_plane(tri[0], 0) && on_plane(tri[1], 0) && on_plane(tri[2], 0))
                m.dirichlet_facets.push_back(tri);
            else if (on_plane(tri[0], Lx) && on_plane(tri[1], Lx) && on_plane(tri[2], Lx))
                m.neumann_facets.push_back(tri);
        }
    return m;
}

std::string BeamMesh::to_json() const {
    nlohmann::json j;
    j["dimensions"] = {Lx, Ly, Lz};
    j["subdivisions"] = {nx, ny, nz};
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : nodes) j["nodes"].push_back({n[0], n[1], n[2]});
    j["tets"] = nlohmann::json::array();
    for (const auto& t : tets) j["tets"].push_back({t[0], t[1], t[2], t[3]});
    j["dirichlet_facets"] = nlohmann::json::array();
    for (const auto& f : dirichlet_facets) j["dirichlet_facets"].push_back({f[0], f[1], f[2]});
    j["neumann_facets"] = nlohmann::json::array();
    for (const auto& f : neumann_facets) j["neumann_facets"].push_back({f[0], f[1], f[2]});
    return j.dump(2);
}

} // namespace viscocal
