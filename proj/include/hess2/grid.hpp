#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "hess2/spectral.hpp"

namespace hess2 {

enum class NodeTag : std::uint8_t { Interior, Boundary, Exterior };

// Contiguous run of interior nodes along the fastest (x3) axis.
struct InteriorRun {
    std::size_t first;   // full-grid index of the first node
    std::size_t length;
    std::size_t offset;  // position of the first node in interior order
};

// Masked cubic lattice over [-1,1]^3 covering the unit ball. Nodes are stored
// row-major with x1 slowest: index = (i*n + j)*n + k.
//
// interior  <=> |x| < 1 - h*bandwidth
// boundary  <=> not interior and (|x| <= 1 or some 26-neighbour is interior)
// exterior  otherwise
class BallGrid {
public:
    BallGrid(int n, double bandwidth);

    int n() const { return n_; }
    double h() const { return h_; }
    double bandwidth() const { return bandwidth_; }
    std::size_t size() const { return tags_.size(); }

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
    }
    std::array<int, 3> ijk(std::size_t idx) const;
    double coord(int i) const { return -1.0 + i * h_; }
    Vec3 position(std::size_t idx) const;

    NodeTag tag(std::size_t idx) const { return tags_[idx]; }
    bool is_interior(std::size_t idx) const { return tags_[idx] == NodeTag::Interior; }

    // Full-grid indices of interior nodes, ascending.
    std::span<const std::size_t> interior() const { return interior_; }
    std::span<const InteriorRun> runs() const { return runs_; }

    // Full-grid index offset of a lattice step (di, dj, dk).
    std::ptrdiff_t stride(int di, int dj, int dk) const {
        return (static_cast<std::ptrdiff_t>(di) * n_ + dj) * n_ + dk;
    }

private:
    int n_;
    double h_;
    double bandwidth_;
    std::vector<NodeTag> tags_;
    std::vector<std::size_t> interior_;
    std::vector<InteriorRun> runs_;
};

using GridPtr = std::shared_ptr<const BallGrid>;

// Throws ConfigError unless n is odd and >= 9 and bandwidth >= 1.
GridPtr make_grid(int n, double bandwidth = 1.5);

// Scalar field over a BallGrid. Exterior nodes always hold 0. Dirichlet fields
// (the default) also hold 0 on boundary nodes; `sample` builds a field with
// analytic boundary data for stencil checks.
class GridField {
public:
    explicit GridField(GridPtr grid);

    using Fn = std::function<double(const Vec3&)>;

    // Values at interior and boundary nodes.
    static GridField sample(GridPtr grid, const Fn& fn);
    // Values at interior nodes, boundary pinned to 0.
    static GridField sample_pinned(GridPtr grid, const Fn& fn);

    const BallGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    bool dirichlet() const { return dirichlet_; }

    double operator[](std::size_t idx) const { return data_[idx]; }
    double at(int i, int j, int k) const { return data_[grid_->index(i, j, k)]; }
    std::span<const double> data() const { return data_; }

    // Writes an interior node; non-interior writes are rejected with DomainError.
    void set(std::size_t idx, double v);
    // Raw access to the full-grid buffer for kernels that only touch interior
    // entries. Callers must not write non-interior entries.
    std::span<double> interior_buffer() { return data_; }

    GridField& operator+=(const GridField& other);
    GridField& operator*=(double s);
    friend GridField operator+(GridField a, const GridField& b) { return a += b; }
    friend GridField operator*(double s, GridField a) { return a *= s; }
    GridField operator-() const;

    // Zero boundary entries and mark the field Dirichlet.
    void pin();

private:
    GridPtr grid_;
    std::vector<double> data_;
    bool dirichlet_ = true;
};

// Central differences at a node whose 26-neighbourhood lies inside the lattice.
// Axes are zero-based.
double stencil_d1(const GridField& f, std::size_t idx, int axis);
double stencil_d2(const GridField& f, std::size_t idx, int a, int b);

// FD derivative fields, defined on interior nodes and 0 elsewhere.
GridField d1(const GridField& f, int axis);
GridField d2(const GridField& f, int a, int b);

// Sup over interior nodes of |F| and of all FD derivatives up to `order` (0..2).
double norms(const GridField& f, int order);

// The six second differences at an interior node.
SymMat3 hessian_at(const GridField& f, std::size_t idx);

// Interior nodes only, row-major, columns i,j,k,x1,x2,x3,value.
void write_csv(const GridField& f, std::ostream& os);
// Inverse of write_csv onto `grid`; node coordinates must match.
GridField read_csv(GridPtr grid, std::istream& is);

}  // namespace hess2
