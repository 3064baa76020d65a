#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "xdrc/errors.hpp"
#include "xdrc/stats.hpp"

namespace xdrc {

using Complex = std::complex<double>;
using SpinField = std::vector<std::int8_t>;

// Directions on the square lattice, counterclockwise: east, north, west, south.
inline constexpr std::array<int, 4> kDirX{1, 0, -1, 0};
inline constexpr std::array<int, 4> kDirY{0, 1, 0, -1};
constexpr int left_of(int d) { return (d + 1) & 3; }
constexpr int opposite(int d) { return (d + 2) & 3; }

// Points of a square lattice of spacing 2 in doubled integer coordinates.
// Primal vertices live at even/even positions, faces at odd/odd positions.
struct LatticePoint {
    int x = 0;
    int y = 0;
    friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

class PlanarLattice {
public:
    PlanarLattice() = default;

    // parity: 0 for even/even coordinates, 1 for odd/odd.
    PlanarLattice(std::vector<LatticePoint> pts, int parity) : parity_(parity), points_(std::move(pts)) {
        if (points_.empty()) return;
        int x0 = std::numeric_limits<int>::max(), y0 = x0;
        int x1 = std::numeric_limits<int>::min(), y1 = x1;
        for (const auto& p : points_) {
            x0 = std::min(x0, p.x);
            y0 = std::min(y0, p.y);
            x1 = std::max(x1, p.x);
            y1 = std::max(y1, p.y);
        }
        x0_ = x0;
        y0_ = y0;
        nx_ = (x1 - x0) / 2 + 1;
        ny_ = (y1 - y0) / 2 + 1;
        grid_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), -1);
        for (std::size_t v = 0; v < points_.size(); ++v) {
            const auto& p = points_[v];
            grid_[cell(p.x, p.y)] = static_cast<int>(v);
        }
        incident_.assign(points_.size(), {-1, -1, -1, -1});
    }

    int parity() const { return parity_; }
    std::size_t size() const { return points_.size(); }
    std::size_t num_edges() const { return edges_.size(); }
    const LatticePoint& point(int v) const { return points_[static_cast<std::size_t>(v)]; }
    const std::vector<LatticePoint>& points() const { return points_; }

    int index(int x, int y) const {
        if (points_.empty()) return -1;
        if (((x - x0_) & 1) || ((y - y0_) & 1)) return -1;
        const int i = (x - x0_) / 2, j = (y - y0_) / 2;
        if (x < x0_ || y < y0_ || i >= nx_ || j >= ny_) return -1;
        return grid_[cell(x, y)];
    }
    int neighbor(int v, int d) const {
        const auto& p = point(v);
        return index(p.x + 2 * kDirX[static_cast<std::size_t>(d)], p.y + 2 * kDirY[static_cast<std::size_t>(d)]);
    }

    // Adds the edge between v and its neighbor in direction east or north.
    int add_edge(int v, int d) {
        const int w = neighbor(v, d);
        if (w < 0 || (d != 0 && d != 1)) throw InvalidVertex("add_edge: no lattice neighbor");
        const int e = static_cast<int>(edges_.size());
        edges_.push_back({v, w});
        vertical_.push_back(static_cast<std::uint8_t>(d == 1));
        incident_[static_cast<std::size_t>(v)][static_cast<std::size_t>(d)] = e;
        incident_[static_cast<std::size_t>(w)][static_cast<std::size_t>(opposite(d))] = e;
        return e;
    }

    const std::array<int, 2>& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }
    bool is_vertical(int e) const { return vertical_[static_cast<std::size_t>(e)] != 0; }
    int incident_edge(int v, int d) const {
        return incident_[static_cast<std::size_t>(v)][static_cast<std::size_t>(d)];
    }
    // Midpoint of an edge in doubled coordinates.
    LatticePoint edge_midpoint(int e) const {
        const auto& a = point(edge(e)[0]);
        const auto& b = point(edge(e)[1]);
        return {(a.x + b.x) / 2, (a.y + b.y) / 2};
    }

private:
    std::size_t cell(int x, int y) const {
        return static_cast<std::size_t>((y - y0_) / 2) * static_cast<std::size_t>(nx_) +
               static_cast<std::size_t>((x - x0_) / 2);
    }

    int parity_ = 0;
    std::vector<LatticePoint> points_;
    int x0_ = 0, y0_ = 0, nx_ = 0, ny_ = 0;
    std::vector<int> grid_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::uint8_t> vertical_;
    std::vector<std::array<int, 4>> incident_;
};

enum class ShapeKind { unit_square, unit_disk, rectangle };

struct Shape {
    ShapeKind kind = ShapeKind::unit_square;
    double width = 1.0;
    double height = 1.0;

    static Shape unit_square() { return {ShapeKind::unit_square, 1.0, 1.0}; }
    static Shape unit_disk() { return {ShapeKind::unit_disk, 2.0, 2.0}; }
    static Shape rectangle(double w, double h) {
        if (!(w > 0.0) || !(h > 0.0)) throw InvalidParameter("rectangle: sides must be positive");
        return {ShapeKind::rectangle, w, h};
    }

    std::string name() const {
        switch (kind) {
            case ShapeKind::unit_square: return "unit_square";
            case ShapeKind::unit_disk: return "unit_disk";
            case ShapeKind::rectangle: return "rectangle";
        }
        return "unknown";
    }

    // Closed square [x0,x1] x [y0,y1] meets the open shape.
    bool square_meets(double x0, double x1, double y0, double y1) const {
        if (kind == ShapeKind::unit_disk) {
            const double cx = std::clamp(0.0, x0, x1), cy = std::clamp(0.0, y0, y1);
            return cx * cx + cy * cy < 1.0;
        }
        return x1 > 0.0 && x0 < width && y1 > 0.0 && y0 < height;
    }
    // Closed square lies inside the open shape.
    bool square_inside(double x0, double x1, double y0, double y1) const {
        if (kind == ShapeKind::unit_disk) {
            const double mx = std::max(std::fabs(x0), std::fabs(x1));
            const double my = std::max(std::fabs(y0), std::fabs(y1));
            return mx * mx + my * my < 1.0;
        }
        return x0 > 0.0 && x1 < width && y0 > 0.0 && y1 < height;
    }
    double diameter() const {
        return kind == ShapeKind::unit_disk ? 2.0 : std::hypot(width, height);
    }
    double side() const { return kind == ShapeKind::unit_disk ? 2.0 : std::max(width, height); }
};

struct TestFunction {
    std::function<double(Complex)> eval;
    double bound = 0.0;

    double operator()(Complex z) const { return eval(z); }
    static TestFunction constant(double c) {
        return {[c](Complex) { return c; }, std::fabs(c)};
    }
};

class DiscreteDomain {
public:
    Shape shape;
    double mesh = 0.0;
    PlanarLattice primal;
    std::vector<std::uint8_t> boundary;      // per primal vertex
    PlanarLattice dual;                      // bounded faces and the dual edges crossing interior edges
    std::vector<int> dual_of_primal_edge;    // -1 for edges joining two boundary vertices
    std::vector<int> primal_of_dual_edge;
    std::vector<std::array<int, 2>> edge_faces;  // {left, right} face of each oriented primal edge, -1 if unbounded

    std::size_t num_vertices() const { return primal.size(); }
    std::size_t num_interior() const { return num_interior_; }
    std::size_t num_boundary() const { return primal.size() - num_interior_; }
    bool is_boundary(int v) const { return boundary[static_cast<std::size_t>(v)] != 0; }
    bool is_interior_edge(int e) const { return dual_of_primal_edge[static_cast<std::size_t>(e)] >= 0; }
    double face_area() const { return mesh * mesh; }

    Complex position(const LatticePoint& p) const { return {0.5 * mesh * p.x, 0.5 * mesh * p.y}; }
    Complex vertex_position(int v) const { return position(primal.point(v)); }
    Complex face_position(int f) const { return position(dual.point(f)); }

    // Nearest primal vertex to a point of the plane, or -1 if none is near.
    int nearest_vertex(Complex z) const {
        const int i = static_cast<int>(std::lround(z.real() / mesh));
        const int j = static_cast<int>(std::lround(z.imag() / mesh));
        return primal.index(2 * i, 2 * j);
    }
    int nearest_interior_vertex(Complex z) const {
        const int v = nearest_vertex(z);
        if (v < 0 || is_boundary(v)) throw OutOfDomain("no interior vertex near the requested point");
        return v;
    }
    // Face whose center is nearest to z.
    int nearest_face(Complex z) const {
        const int i = static_cast<int>(std::floor(z.real() / mesh));
        const int j = static_cast<int>(std::floor(z.imag() / mesh));
        const int f = dual.index(2 * i + 1, 2 * j + 1);
        if (f < 0) throw OutOfDomain("no dual vertex near the requested point");
        return f;
    }

    std::size_t num_interior_ = 0;
};

using DomainPtr = std::shared_ptr<const DiscreteDomain>;

inline DomainPtr build_domain(const Shape& shape, double mesh) {
    if (!(mesh > 0.0) || mesh > 1.0) throw InvalidParameter("mesh must lie in (0, 1]");
    auto dom = std::make_shared<DiscreteDomain>();
    dom->shape = shape;
    dom->mesh = mesh;

    int ilo, ihi, jlo, jhi;
    if (shape.kind == ShapeKind::unit_disk) {
        const int r = static_cast<int>(std::ceil(1.0 / mesh)) + 1;
        ilo = jlo = -r;
        ihi = jhi = r;
    } else {
        ilo = jlo = -1;
        ihi = static_cast<int>(std::ceil(shape.width / mesh)) + 1;
        jhi = static_cast<int>(std::ceil(shape.height / mesh)) + 1;
    }

    std::vector<LatticePoint> pts;
    std::vector<std::uint8_t> bnd;
    for (int j = jlo; j <= jhi; ++j) {
        for (int i = ilo; i <= ihi; ++i) {
            const double x0 = (i - 0.5) * mesh, x1 = (i + 0.5) * mesh;
            const double y0 = (j - 0.5) * mesh, y1 = (j + 0.5) * mesh;
            if (!shape.square_meets(x0, x1, y0, y1)) continue;
            pts.push_back({2 * i, 2 * j});
            bnd.push_back(static_cast<std::uint8_t>(!shape.square_inside(x0, x1, y0, y1)));
        }
    }
    std::size_t interior = 0;
    for (auto b : bnd) interior += (b == 0);
    if (interior == 0) throw DegenerateDomain("mesh too coarse: the domain has no interior vertex");

    dom->primal = PlanarLattice(std::move(pts), 0);
    dom->boundary = std::move(bnd);
    dom->num_interior_ = interior;
    auto& g = dom->primal;
    for (int v = 0; v < static_cast<int>(g.size()); ++v)
        for (int d : {0, 1})
            if (g.neighbor(v, d) >= 0) g.add_edge(v, d);

    // Bounded faces: unit squares whose four corners are vertices.
    std::vector<LatticePoint> faces;
    for (int v = 0; v < static_cast<int>(g.size()); ++v) {
        const auto& p = g.point(v);
        if (g.index(p.x + 2, p.y) >= 0 && g.index(p.x, p.y + 2) >= 0 && g.index(p.x + 2, p.y + 2) >= 0)
            faces.push_back({p.x + 1, p.y + 1});
    }
    dom->dual = PlanarLattice(std::move(faces), 1);
    auto& du = dom->dual;

    dom->edge_faces.resize(g.num_edges());
    dom->dual_of_primal_edge.assign(g.num_edges(), -1);
    for (int e = 0; e < static_cast<int>(g.num_edges()); ++e) {
        const auto m = g.edge_midpoint(e);
        const bool vert = g.is_vertical(e);
        // Left of an eastward edge is north; left of a northward edge is west.
        const int left = vert ? du.index(m.x - 1, m.y) : du.index(m.x, m.y + 1);
        const int right = vert ? du.index(m.x + 1, m.y) : du.index(m.x, m.y - 1);
        dom->edge_faces[static_cast<std::size_t>(e)] = {left, right};
    }
    for (int e = 0; e < static_cast<int>(g.num_edges()); ++e) {
        const auto [a, b] = g.edge(e);
        if (dom->is_boundary(a) && dom->is_boundary(b)) continue;
        const auto [left, right] = dom->edge_faces[static_cast<std::size_t>(e)];
        if (left < 0 || right < 0)
            throw DegenerateDomain("interior edge adjacent to the unbounded face");
        // Dual edges are stored with the same east/north orientation convention:
        // a vertical primal edge is crossed by an eastward dual edge (left face to right face),
        // a horizontal primal edge by a northward dual edge (right face to left face).
        const int de = g.is_vertical(e) ? du.add_edge(left, 0) : du.add_edge(right, 1);
        dom->dual_of_primal_edge[static_cast<std::size_t>(e)] = de;
    }
    dom->primal_of_dual_edge.assign(du.num_edges(), -1);
    for (int e = 0; e < static_cast<int>(g.num_edges()); ++e) {
        const int de = dom->dual_of_primal_edge[static_cast<std::size_t>(e)];
        if (de >= 0) dom->primal_of_dual_edge[static_cast<std::size_t>(de)] = e;
    }
    return dom;
}

// m x m interior vertices on the unit square.
inline DomainPtr square_domain(int interior_side) {
    if (interior_side < 1) throw InvalidParameter("square_domain: side must be positive");
    return build_domain(Shape::unit_square(), 1.0 / (interior_side + 1));
}

// delta^{-1/4} * sum over interior vertices of field(v) f(center(v)) delta^2,
// summed exactly so that the value does not depend on the summation order.
template <class Field>
double pair_field(const Field& field, const TestFunction& f, const DiscreteDomain& dom) {
    if (field.size() != dom.num_vertices()) throw ShapeMismatch("pair_field: field size differs from domain");
    ExactSum acc;
    const double area = dom.face_area();
    for (std::size_t v = 0; v < field.size(); ++v) {
        if (dom.boundary[v]) continue;
        const double term = f(dom.vertex_position(static_cast<int>(v))) * area;
        acc.add(static_cast<double>(field[v]) * term);
    }
    return std::pow(dom.mesh, -0.25) * acc.value();
}

}  // namespace xdrc
