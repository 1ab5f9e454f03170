#include "chladni/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace chladni {

namespace {

template <std::size_t N>
std::array<int, N - 1> drop(const std::array<int, N>& s, std::size_t i) {
    std::array<int, N - 1> out{};
    for (std::size_t a = 0, b = 0; a < N; ++a) {
        if (a != i) out[b++] = s[a];
    }
    return out;
}

void build_csr(int rows, const std::vector<std::pair<int, int>>& pairs,
               std::vector<int>& offsets, std::vector<int>& values) {
    offsets.assign(rows + 1, 0);
    for (const auto& [r, v] : pairs) ++offsets[r + 1];
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    values.resize(pairs.size());
    std::vector<int> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& [r, v] : pairs) values[cursor[r]++] = v;
    for (int r = 0; r < rows; ++r) {
        std::sort(values.begin() + offsets[r], values.begin() + offsets[r + 1]);
    }
}

std::span<const int> csr_row(const std::vector<int>& offsets, const std::vector<int>& values,
                             int r) {
    return {values.data() + offsets[r], static_cast<std::size_t>(offsets[r + 1] - offsets[r])};
}

int parity_sign(int i) { return (i % 2 == 0) ? 1 : -1; }

}  // namespace

SimplicialComplex3 SimplicialComplex3::from_tets(std::vector<Vec3> vertices,
                                                 std::vector<std::array<int, 4>> tets) {
    SimplicialComplex3 k;
    k.vertices_ = std::move(vertices);
    const int nv = k.num_vertices();

    double scale = 0.0;
    for (const auto& v : k.vertices_) scale = std::max(scale, v.cwiseAbs().maxCoeff());
    scale = std::max(scale, 1e-300);

    k.tets_.reserve(tets.size());
    k.tet_sign_.reserve(tets.size());
    for (auto t : tets) {
        for (int p : t) {
            if (p < 0 || p >= nv) throw std::invalid_argument("tetrahedron vertex out of range");
        }
        std::sort(t.begin(), t.end());
        if (std::adjacent_find(t.begin(), t.end()) != t.end()) {
            throw std::invalid_argument("tetrahedron with repeated vertex");
        }
        Eigen::Matrix3d m;
        m.col(0) = k.vertices_[t[1]] - k.vertices_[t[0]];
        m.col(1) = k.vertices_[t[2]] - k.vertices_[t[0]];
        m.col(2) = k.vertices_[t[3]] - k.vertices_[t[0]];
        const double det = m.determinant();
        double edge = std::max({m.col(0).norm(), m.col(1).norm(), m.col(2).norm()});
        if (std::abs(det) <= 1e-12 * edge * edge * edge) {
            throw std::invalid_argument("degenerate tetrahedron");
        }
        k.tets_.push_back(t);
        k.tet_sign_.push_back(det > 0 ? 1 : -1);
    }
    const int nt = k.num_tets();

    // Faces.
    struct FaceRec {
        std::array<int, 3> v;
        int tet;
        int local;
    };
    std::vector<FaceRec> frec;
    frec.reserve(4 * tets.size());
    for (int t = 0; t < nt; ++t) {
        for (int i = 0; i < 4; ++i) frec.push_back({drop(k.tets_[t], i), t, i});
    }
    std::sort(frec.begin(), frec.end(), [](const FaceRec& a, const FaceRec& b) {
        return a.v != b.v ? a.v < b.v : a.tet < b.tet;
    });
    k.tet_faces_.assign(nt, {-1, -1, -1, -1});
    std::vector<std::pair<int, int>> face_tet_pairs;
    face_tet_pairs.reserve(frec.size());
    for (std::size_t a = 0; a < frec.size(); ++a) {
        if (a == 0 || frec[a].v != frec[a - 1].v) k.faces_.push_back(frec[a].v);
        const int f = k.num_faces() - 1;
        k.tet_faces_[frec[a].tet][frec[a].local] = f;
        face_tet_pairs.emplace_back(f, frec[a].tet);
    }
    const int nf = k.num_faces();
    build_csr(nf, face_tet_pairs, k.face_tets_offsets_, k.face_tets_);
    for (int f = 0; f < nf; ++f) {
        const auto n = k.face_tets(f).size();
        if (n > 2) throw std::invalid_argument("face shared by more than two tetrahedra");
        if (n == 1) ++k.num_boundary_faces_;
    }

    // Edges.
    struct EdgeRec {
        std::array<int, 2> v;
        int face;
        int local;
    };
    std::vector<EdgeRec> erec;
    erec.reserve(3 * static_cast<std::size_t>(nf));
    for (int f = 0; f < nf; ++f) {
        for (int i = 0; i < 3; ++i) erec.push_back({drop(k.faces_[f], i), f, i});
    }
    std::sort(erec.begin(), erec.end(), [](const EdgeRec& a, const EdgeRec& b) {
        return a.v != b.v ? a.v < b.v : a.face < b.face;
    });
    k.face_edges_.assign(nf, {-1, -1, -1});
    std::vector<std::pair<int, int>> edge_face_pairs;
    edge_face_pairs.reserve(erec.size());
    for (std::size_t a = 0; a < erec.size(); ++a) {
        if (a == 0 || erec[a].v != erec[a - 1].v) k.edges_.push_back(erec[a].v);
        const int e = k.num_edges() - 1;
        k.face_edges_[erec[a].face][erec[a].local] = e;
        edge_face_pairs.emplace_back(e, erec[a].face);
    }
    const int ne = k.num_edges();
    build_csr(ne, edge_face_pairs, k.edge_faces_offsets_, k.edge_faces_);

    std::vector<std::pair<int, int>> vertex_edge_pairs;
    vertex_edge_pairs.reserve(2 * static_cast<std::size_t>(ne));
    for (int e = 0; e < ne; ++e) {
        vertex_edge_pairs.emplace_back(k.edges_[e][0], e);
        vertex_edge_pairs.emplace_back(k.edges_[e][1], e);
    }
    build_csr(nv, vertex_edge_pairs, k.vertex_edges_offsets_, k.vertex_edges_);

    std::vector<std::pair<int, int>> vertex_tet_pairs;
    vertex_tet_pairs.reserve(4 * static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) {
        for (int p : k.tets_[t]) vertex_tet_pairs.emplace_back(p, t);
    }
    build_csr(nv, vertex_tet_pairs, k.vertex_tets_offsets_, k.vertex_tets_);

    k.boundary_edge_.assign(ne, 0);
    k.boundary_vertex_.assign(nv, 0);
    for (int f = 0; f < nf; ++f) {
        if (!k.is_boundary_face(f)) continue;
        for (int e : k.face_edges_[f]) k.boundary_edge_[e] = 1;
        for (int p : k.faces_[f]) k.boundary_vertex_[p] = 1;
    }
    return k;
}

int SimplicialComplex3::count(int dim) const {
    switch (dim) {
        case 0: return num_vertices();
        case 1: return num_edges();
        case 2: return num_faces();
        case 3: return num_tets();
        default: throw std::invalid_argument("simplex dimension must be in 0..3");
    }
}

std::span<const int> SimplicialComplex3::face_tets(int f) const {
    return csr_row(face_tets_offsets_, face_tets_, f);
}
std::span<const int> SimplicialComplex3::edge_faces(int e) const {
    return csr_row(edge_faces_offsets_, edge_faces_, e);
}
std::span<const int> SimplicialComplex3::vertex_edges(int p) const {
    return csr_row(vertex_edges_offsets_, vertex_edges_, p);
}
std::span<const int> SimplicialComplex3::vertex_tets(int p) const {
    return csr_row(vertex_tets_offsets_, vertex_tets_, p);
}

int SimplicialComplex3::find_face(int a, int b, int c) const {
    std::array<int, 3> key{a, b, c};
    std::sort(key.begin(), key.end());
    auto it = std::lower_bound(faces_.begin(), faces_.end(), key);
    return (it != faces_.end() && *it == key) ? static_cast<int>(it - faces_.begin()) : -1;
}

int SimplicialComplex3::find_edge(int a, int b) const {
    std::array<int, 2> key{std::min(a, b), std::max(a, b)};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
    return (it != edges_.end() && *it == key) ? static_cast<int>(it - edges_.begin()) : -1;
}

int SimplicialComplex3::incidence(SimplexRef a, SimplexRef b) const {
    if (b.dim != a.dim + 1 || a.dim < 0 || b.dim > 3) {
        throw std::invalid_argument("incidence requires dim b = dim a + 1");
    }
    if (a.id < 0 || a.id >= count(a.dim) || b.id < 0 || b.id >= count(b.dim)) {
        throw std::out_of_range("incidence: unknown simplex id");
    }
    switch (b.dim) {
        case 1: {
            const auto& e = edges_[b.id];
            if (e[0] == a.id) return -1;
            if (e[1] == a.id) return 1;
            return 0;
        }
        case 2: {
            const auto& fe = face_edges_[b.id];
            for (int i = 0; i < 3; ++i) {
                if (fe[i] == a.id) return parity_sign(i);
            }
            return 0;
        }
        default: {
            const auto& tf = tet_faces_[b.id];
            for (int i = 0; i < 4; ++i) {
                if (tf[i] == a.id) return parity_sign(i) * tet_sign_[b.id];
            }
            return 0;
        }
    }
}

std::vector<int> SimplicialComplex3::star(SimplexRef s) const {
    if (s.dim < 0 || s.dim > 3 || s.id < 0 || s.id >= count(s.dim)) {
        throw std::out_of_range("star: unknown simplex");
    }
    std::vector<int> out;
    switch (s.dim) {
        case 0: {
            auto r = vertex_tets(s.id);
            out.assign(r.begin(), r.end());
            break;
        }
        case 1:
            for (int f : edge_faces(s.id)) {
                for (int t : face_tets(f)) out.push_back(t);
            }
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            break;
        case 2: {
            auto r = face_tets(s.id);
            out.assign(r.begin(), r.end());
            break;
        }
        default: out.push_back(s.id);
    }
    return out;
}

double SimplicialComplex3::tet_volume(int t) const {
    const auto& v = tets_[t];
    Eigen::Matrix3d m;
    m.col(0) = vertices_[v[1]] - vertices_[v[0]];
    m.col(1) = vertices_[v[2]] - vertices_[v[0]];
    m.col(2) = vertices_[v[3]] - vertices_[v[0]];
    return std::abs(m.determinant()) / 6.0;
}

double SimplicialComplex3::face_area(int f) const {
    const auto& v = faces_[f];
    return 0.5 * (vertices_[v[1]] - vertices_[v[0]]).cross(vertices_[v[2]] - vertices_[v[0]]).norm();
}

Vec3 SimplicialComplex3::face_normal(int f) const {
    const auto& v = faces_[f];
    return (vertices_[v[1]] - vertices_[v[0]]).cross(vertices_[v[2]] - vertices_[v[0]]).normalized();
}

Vec3 SimplicialComplex3::barycenter(SimplexRef s) const {
    Vec3 c = Vec3::Zero();
    switch (s.dim) {
        case 0: return vertices_[s.id];
        case 1:
            for (int p : edges_[s.id]) c += vertices_[p];
            return c / 2.0;
        case 2:
            for (int p : faces_[s.id]) c += vertices_[p];
            return c / 3.0;
        case 3:
            for (int p : tets_[s.id]) c += vertices_[p];
            return c / 4.0;
        default: throw std::invalid_argument("simplex dimension must be in 0..3");
    }
}

double SimplicialComplex3::boundary_area() const {
    double a = 0.0;
    for (int f = 0; f < num_faces(); ++f) {
        if (is_boundary_face(f)) a += face_area(f);
    }
    return a;
}

Classification classify(const SimplicialComplex3& k) {
    Classification c;
    for (int f = 0; f < k.num_faces(); ++f) {
        const auto& v = k.face(f);
        const bool all = std::all_of(v.begin(), v.end(), [&](int p) { return k.is_boundary_vertex(p); });
        (all ? c.boundary_faces : c.interior_faces).push_back(f);
    }
    for (int e = 0; e < k.num_edges(); ++e) {
        const auto& v = k.edge(e);
        const bool all = k.is_boundary_vertex(v[0]) && k.is_boundary_vertex(v[1]);
        (all ? c.boundary_edges : c.interior_edges).push_back(e);
    }
    return c;
}

namespace {

// Five-tetrahedron split of a hexahedral block given its corners c[a][b][c]
// (a, b, c in {0, 1} along x, y, z). Even parity uses the central
// tetrahedron on corners with a+b+c even, odd parity the complementary one.
void split_block(const int c[2][2][2], bool odd, std::vector<std::array<int, 4>>& out) {
    auto at = [&](int a, int b, int d) { return c[a][b][d]; };
    if (!odd) {
        out.push_back({at(0, 0, 0), at(1, 1, 0), at(1, 0, 1), at(0, 1, 1)});
        out.push_back({at(1, 0, 0), at(0, 0, 0), at(1, 1, 0), at(1, 0, 1)});
        out.push_back({at(0, 1, 0), at(0, 0, 0), at(1, 1, 0), at(0, 1, 1)});
        out.push_back({at(0, 0, 1), at(0, 0, 0), at(1, 0, 1), at(0, 1, 1)});
        out.push_back({at(1, 1, 1), at(1, 1, 0), at(1, 0, 1), at(0, 1, 1)});
    } else {
        out.push_back({at(1, 0, 0), at(0, 1, 0), at(0, 0, 1), at(1, 1, 1)});
        out.push_back({at(0, 0, 0), at(1, 0, 0), at(0, 1, 0), at(0, 0, 1)});
        out.push_back({at(1, 1, 0), at(1, 0, 0), at(0, 1, 0), at(1, 1, 1)});
        out.push_back({at(1, 0, 1), at(1, 0, 0), at(0, 0, 1), at(1, 1, 1)});
        out.push_back({at(0, 1, 1), at(0, 1, 0), at(0, 0, 1), at(1, 1, 1)});
    }
}

}  // namespace

SimplicialComplex3 build_slab(int nx, int ny, int nz, double dx, double dy, double dz) {
    if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("block counts must be >= 1");
    if (!(dx > 0 && dy > 0 && dz > 0)) throw std::invalid_argument("block sizes must be > 0");
    auto idx = [&](int i, int j, int k) { return (i * (ny + 1) + j) * (nz + 1) + k; };
    std::vector<Vec3> verts;
    verts.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1));
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= ny; ++j)
            for (int k = 0; k <= nz; ++k) verts.emplace_back(i * dx, j * dy, k * dz);
    std::vector<std::array<int, 4>> tets;
    tets.reserve(5 * static_cast<std::size_t>(nx) * ny * nz);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                int c[2][2][2];
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        for (int d = 0; d < 2; ++d) c[a][b][d] = idx(i + a, j + b, k + d);
                split_block(c, (i + j + k) % 2 == 1, tets);
            }
    return SimplicialComplex3::from_tets(std::move(verts), std::move(tets));
}

SimplicialComplex3 build_heightfield_plate(const HeightfieldPlate& p) {
    if (p.nx < 1 || p.nz < 1) throw std::invalid_argument("heightfield grid must be non-empty");
    const std::size_t n = static_cast<std::size_t>(p.nx) * p.nz;
    if (p.mask.size() != n || p.thickness.size() != n || p.elevation.size() != n) {
        throw std::invalid_argument("heightfield maps must share the mask dimensions");
    }
    if (!(p.cell > 0)) throw std::invalid_argument("cell size must be > 0");
    if (p.layers < 1) throw std::invalid_argument("layer count must be >= 1");
    auto cell = [&](int i, int k) { return static_cast<std::size_t>(i) * p.nz + k; };

    int first = -1;
    int masked = 0;
    for (std::size_t c = 0; c < n; ++c) {
        if (!p.mask[c]) continue;
        if (!(p.thickness[c] > 0)) throw std::invalid_argument("thickness must be > 0 on masked cells");
        if (first < 0) first = static_cast<int>(c);
        ++masked;
    }
    if (masked == 0) throw std::invalid_argument("heightfield mask is empty");

    // Edge-connectivity of the masked cells.
    std::vector<std::uint8_t> seen(n, 0);
    std::queue<int> q;
    q.push(first);
    seen[first] = 1;
    int reached = 0;
    while (!q.empty()) {
        const int c = q.front();
        q.pop();
        ++reached;
        const int i = c / p.nz, k = c % p.nz;
        const int di[4] = {1, -1, 0, 0}, dk[4] = {0, 0, 1, -1};
        for (int s = 0; s < 4; ++s) {
            const int ii = i + di[s], kk = k + dk[s];
            if (ii < 0 || kk < 0 || ii >= p.nx || kk >= p.nz) continue;
            const auto cc = cell(ii, kk);
            if (p.mask[cc] && !seen[cc]) {
                seen[cc] = 1;
                q.push(static_cast<int>(cc));
            }
        }
    }
    if (reached != masked) throw std::invalid_argument("heightfield mask is disconnected");

    // Nodal thickness/elevation averaged over adjacent masked cells.
    const int ny = p.layers;
    std::vector<double> node_t((p.nx + 1) * (p.nz + 1), 0.0), node_e(node_t.size(), 0.0);
    std::vector<int> node_n(node_t.size(), 0);
    auto node = [&](int i, int k) { return i * (p.nz + 1) + k; };
    for (int i = 0; i < p.nx; ++i)
        for (int k = 0; k < p.nz; ++k) {
            const auto c = cell(i, k);
            if (!p.mask[c]) continue;
            for (int a = 0; a < 2; ++a)
                for (int d = 0; d < 2; ++d) {
                    const int nd = node(i + a, k + d);
                    node_t[nd] += p.thickness[c];
                    node_e[nd] += p.elevation[c];
                    ++node_n[nd];
                }
        }

    std::vector<int> vid(static_cast<std::size_t>(p.nx + 1) * (ny + 1) * (p.nz + 1), -1);
    auto gidx = [&](int i, int j, int k) { return (i * (ny + 1) + j) * (p.nz + 1) + k; };
    std::vector<Vec3> verts;
    for (int i = 0; i <= p.nx; ++i)
        for (int j = 0; j <= ny; ++j)
            for (int k = 0; k <= p.nz; ++k) {
                const int nd = node(i, k);
                if (node_n[nd] == 0) continue;
                const double th = node_t[nd] / node_n[nd];
                const double el = node_e[nd] / node_n[nd];
                vid[gidx(i, j, k)] = static_cast<int>(verts.size());
                verts.emplace_back(i * p.cell, el + th * j / ny, k * p.cell);
            }
    std::vector<std::array<int, 4>> tets;
    for (int i = 0; i < p.nx; ++i)
        for (int k = 0; k < p.nz; ++k) {
            if (!p.mask[cell(i, k)]) continue;
            for (int j = 0; j < ny; ++j) {
                int c[2][2][2];
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        for (int d = 0; d < 2; ++d) c[a][b][d] = vid[gidx(i + a, j + b, k + d)];
                split_block(c, (i + j + k) % 2 == 1, tets);
            }
        }
    return SimplicialComplex3::from_tets(std::move(verts), std::move(tets));
}

BarycentricSubdivision barycentric_subdivision(const SimplicialComplex3& k) {
    const int nt = k.num_tets(), nf = k.num_faces(), ne = k.num_edges(), nv = k.num_vertices();
    const int off_f = nt, off_e = nt + nf, off_v = nt + nf + ne;

    BarycentricSubdivision sub;
    std::vector<Vec3> verts;
    verts.reserve(static_cast<std::size_t>(off_v + nv));
    sub.vertex_parent.reserve(verts.capacity());
    for (int t = 0; t < nt; ++t) {
        verts.push_back(k.barycenter({3, t}));
        sub.vertex_parent.push_back({3, t});
    }
    for (int f = 0; f < nf; ++f) {
        verts.push_back(k.barycenter({2, f}));
        sub.vertex_parent.push_back({2, f});
    }
    for (int e = 0; e < ne; ++e) {
        verts.push_back(k.barycenter({1, e}));
        sub.vertex_parent.push_back({1, e});
    }
    for (int p = 0; p < nv; ++p) {
        verts.push_back(k.vertex(p));
        sub.vertex_parent.push_back({0, p});
    }

    std::vector<std::array<int, 4>> tets;
    tets.reserve(24 * static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t)
        for (int f : k.tet_faces(t))
            for (int e : k.face_edges(f))
                for (int p : k.edge(e)) tets.push_back({t, off_f + f, off_e + e, off_v + p});
    sub.fine = SimplicialComplex3::from_tets(std::move(verts), std::move(tets));

    // from_tets keeps the input tetrahedron order.
    sub.coarse_tet_subtets.resize(nt);
    for (int t = 0; t < nt; ++t)
        for (int s = 0; s < 24; ++s) sub.coarse_tet_subtets[t][s] = 24 * t + s;

    sub.coarse_face_subfaces.resize(nf);
    sub.fine_face_parent.assign(sub.fine.num_faces(), -1);
    for (int f = 0; f < nf; ++f) {
        int s = 0;
        for (int e : k.face_edges(f))
            for (int p : k.edge(e)) {
                const int ff = sub.fine.find_face(off_f + f, off_e + e, off_v + p);
                sub.coarse_face_subfaces[f][s++] = ff;
                sub.fine_face_parent[ff] = f;
            }
        std::sort(sub.coarse_face_subfaces[f].begin(), sub.coarse_face_subfaces[f].end());
    }
    return sub;
}

Vec3 outward_normal(const SimplicialComplex3& k, int f) {
    const auto tets = k.face_tets(f);
    if (tets.size() != 1) throw std::invalid_argument("outward_normal: not a boundary face");
    const auto& fv = k.face(f);
    int opposite = -1;
    for (int p : k.tet(tets[0])) {
        if (p != fv[0] && p != fv[1] && p != fv[2]) opposite = p;
    }
    Vec3 n = k.face_normal(f);
    if (n.dot(k.vertex(opposite) - k.vertex(fv[0])) > 0) n = -n;
    return n;
}

std::vector<BoundaryFrame> boundary_frames(const SimplicialComplex3& k,
                                           const BarycentricSubdivision& sub) {
    std::vector<BoundaryFrame> frames;
    frames.reserve(k.num_boundary_faces());
    for (int f = 0; f < k.num_faces(); ++f) {
        if (!k.is_boundary_face(f)) continue;
        BoundaryFrame fr;
        fr.coarse_face = f;
        fr.normal = outward_normal(k, f);
        const auto& v = k.face(f);
        Vec3 t1 = k.vertex(v[1]) - k.vertex(v[0]);
        t1 -= t1.dot(fr.normal) * fr.normal;
        fr.t1 = t1.normalized();
        fr.t2 = fr.normal.cross(fr.t1);
        fr.subfaces = sub.coarse_face_subfaces[f];
        fr.area = k.face_area(f);
        frames.push_back(fr);
    }
    return frames;
}

std::string mesh_to_json(const SimplicialComplex3& k) {
    nlohmann::ordered_json j;
    auto& verts = j["vertices"] = nlohmann::ordered_json::array();
    for (const auto& v : k.vertices()) verts.push_back({v.x(), v.y(), v.z()});
    auto& tets = j["tets"] = nlohmann::ordered_json::array();
    for (const auto& t : k.tets()) tets.push_back({t[0], t[1], t[2], t[3]});
    auto& bf = j["boundary_faces"] = nlohmann::ordered_json::array();
    for (int f = 0; f < k.num_faces(); ++f) {
        if (k.is_boundary_face(f)) bf.push_back({k.face(f)[0], k.face(f)[1], k.face(f)[2]});
    }
    return j.dump() + "\n";
}

SimplicialComplex3 mesh_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    std::vector<Vec3> verts;
    for (const auto& v : j.at("vertices")) {
        verts.emplace_back(v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>());
    }
    std::vector<std::array<int, 4>> tets;
    for (const auto& t : j.at("tets")) {
        tets.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>(), t.at(3).get<int>()});
    }
    return SimplicialComplex3::from_tets(std::move(verts), std::move(tets));
}

}  // namespace chladni
