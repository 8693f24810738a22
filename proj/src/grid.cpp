#include "hess2/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "hess2/errors.hpp"

namespace hess2 {

BallGrid::BallGrid(int n, double bandwidth)
    : n_(n), h_(2.0 / (n - 1)), bandwidth_(bandwidth),
      tags_(static_cast<std::size_t>(n) * n * n, NodeTag::Exterior) {
    const double r_interior = 1.0 - h_ * bandwidth_;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const Vec3 x{coord(i), coord(j), coord(k)};
                const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
                NodeTag t = NodeTag::Exterior;
                if (r < r_interior) {
                    t = NodeTag::Interior;
                } else if (r <= 1.0) {
                    t = NodeTag::Boundary;
                }
                tags_[index(i, j, k)] = t;
            }
        }
    }
    // Lattice points just outside the sphere can still touch an interior
    // stencil; they join the (pinned) boundary layer.
    for (std::size_t idx = 0; idx < tags_.size(); ++idx) {
        if (tags_[idx] != NodeTag::Interior) continue;
        const auto [i, j, k] = ijk(idx);
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj)
                for (int dk = -1; dk <= 1; ++dk) {
                    const std::size_t nb = index(i + di, j + dj, k + dk);
                    if (tags_[nb] == NodeTag::Exterior) tags_[nb] = NodeTag::Boundary;
                }
    }
    for (std::size_t idx = 0; idx < tags_.size(); ++idx) {
        if (tags_[idx] != NodeTag::Interior) continue;
        if (!runs_.empty() && runs_.back().first + runs_.back().length == idx &&
            ijk(idx)[2] != 0) {
            ++runs_.back().length;
        } else {
            runs_.push_back({idx, 1, interior_.size()});
        }
        interior_.push_back(idx);
    }
}

std::array<int, 3> BallGrid::ijk(std::size_t idx) const {
    const int k = static_cast<int>(idx % n_);
    const int j = static_cast<int>((idx / n_) % n_);
    const int i = static_cast<int>(idx / (static_cast<std::size_t>(n_) * n_));
    return {i, j, k};
}

Vec3 BallGrid::position(std::size_t idx) const {
    const auto [i, j, k] = ijk(idx);
    return {coord(i), coord(j), coord(k)};
}

GridPtr make_grid(int n, double bandwidth) {
    if (n < 9) throw ConfigError("grid size n must be at least 9 (got " + std::to_string(n) + ")");
    if (n % 2 == 0) throw ConfigError("grid size n must be odd (got " + std::to_string(n) + ")");
    if (!(bandwidth >= 1.0)) throw ConfigError("grid bandwidth must be >= 1");
    auto grid = std::make_shared<const BallGrid>(n, bandwidth);
    if (grid->interior().empty()) throw ConfigError("grid has no interior nodes");
    return grid;
}

GridField::GridField(GridPtr grid) : grid_(std::move(grid)), data_(grid_->size(), 0.0) {}

GridField GridField::sample(GridPtr grid, const Fn& fn) {
    GridField f(std::move(grid));
    const BallGrid& g = *f.grid_;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (g.tag(idx) != NodeTag::Exterior) f.data_[idx] = fn(g.position(idx));
    }
    f.dirichlet_ = false;
    return f;
}

GridField GridField::sample_pinned(GridPtr grid, const Fn& fn) {
    GridField f(std::move(grid));
    for (std::size_t idx : f.grid_->interior()) f.data_[idx] = fn(f.grid_->position(idx));
    return f;
}

void GridField::set(std::size_t idx, double v) {
    if (!grid_->is_interior(idx)) throw DomainError("GridField::set: node is not interior");
    data_[idx] = v;
}

GridField& GridField::operator+=(const GridField& other) {
    if (other.grid_ != grid_) throw DomainError("GridField: fields live on different grids");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    if (dirichlet_) pin();
    return *this;
}

GridField& GridField::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

GridField GridField::operator-() const {
    GridField out = *this;
    out *= -1.0;
    return out;
}

void GridField::pin() {
    for (std::size_t idx = 0; idx < data_.size(); ++idx) {
        if (!grid_->is_interior(idx)) data_[idx] = 0.0;
    }
    dirichlet_ = true;
}

double stencil_d1(const GridField& f, std::size_t idx, int axis) {
    const BallGrid& g = f.grid();
    const std::ptrdiff_t s = g.stride(axis == 0, axis == 1, axis == 2);
    const double* p = f.data().data() + idx;
    return (p[s] - p[-s]) / (2.0 * g.h());
}

double stencil_d2(const GridField& f, std::size_t idx, int a, int b) {
    const BallGrid& g = f.grid();
    const double* p = f.data().data() + idx;
    const double h2 = g.h() * g.h();
    const std::ptrdiff_t sa = g.stride(a == 0, a == 1, a == 2);
    if (a == b) return (p[sa] - 2.0 * p[0] + p[-sa]) / h2;
    const std::ptrdiff_t sb = g.stride(b == 0, b == 1, b == 2);
    return (p[sa + sb] - p[sa - sb] - p[-sa + sb] + p[-sa - sb]) / (4.0 * h2);
}

GridField d1(const GridField& f, int axis) {
    if (axis < 0 || axis > 2) throw DomainError("d1: axis must be 0..2");
    GridField out(f.grid_ptr());
    for (std::size_t idx : f.grid().interior()) out.set(idx, stencil_d1(f, idx, axis));
    return out;
}

GridField d2(const GridField& f, int a, int b) {
    if (a < 0 || a > 2 || b < 0 || b > 2) throw DomainError("d2: axes must be 0..2");
    GridField out(f.grid_ptr());
    for (std::size_t idx : f.grid().interior()) out.set(idx, stencil_d2(f, idx, a, b));
    return out;
}

double norms(const GridField& f, int order) {
    if (order < 0 || order > 2) throw DomainError("norms: order must be 0..2");
    double sup = 0.0;
    for (std::size_t idx : f.grid().interior()) {
        sup = std::max(sup, std::abs(f[idx]));
        if (order >= 1) {
            for (int a = 0; a < 3; ++a) sup = std::max(sup, std::abs(stencil_d1(f, idx, a)));
        }
        if (order >= 2) {
            for (int a = 0; a < 3; ++a)
                for (int b = a; b < 3; ++b) sup = std::max(sup, std::abs(stencil_d2(f, idx, a, b)));
        }
    }
    return sup;
}

SymMat3 hessian_at(const GridField& f, std::size_t idx) {
    if (idx >= f.grid().size() || !f.grid().is_interior(idx)) {
        throw DomainError("hessian_at: node is not interior");
    }
    return {stencil_d2(f, idx, 0, 0), stencil_d2(f, idx, 1, 1), stencil_d2(f, idx, 2, 2),
            stencil_d2(f, idx, 0, 1), stencil_d2(f, idx, 0, 2), stencil_d2(f, idx, 1, 2)};
}

void write_csv(const GridField& f, std::ostream& os) {
    const BallGrid& g = f.grid();
    os << "i,j,k,x1,x2,x3,value\n";
    char buf[160];
    for (std::size_t idx : g.interior()) {
        const auto [i, j, k] = g.ijk(idx);
        const Vec3 x = g.position(idx);
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%.17g,%.17g,%.17g\n", i, j, k, x[0], x[1],
                      x[2], f[idx]);
        os << buf;
    }
}

GridField read_csv(GridPtr grid, std::istream& is) {
    GridField out(grid);
    std::string line;
    if (!std::getline(is, line) || line.rfind("i,j,k,x1,x2,x3,value", 0) != 0) {
        throw ConfigError("field CSV: missing header");
    }
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        int i = 0, j = 0, k = 0;
        double x1 = 0, x2 = 0, x3 = 0, v = 0;
        if (std::sscanf(line.c_str(), "%d,%d,%d,%lf,%lf,%lf,%lf", &i, &j, &k, &x1, &x2, &x3, &v) != 7) {
            throw ConfigError("field CSV: malformed row '" + line + "'");
        }
        if (i < 0 || j < 0 || k < 0 || i >= grid->n() || j >= grid->n() || k >= grid->n()) {
            throw ConfigError("field CSV: node index out of range");
        }
        const std::size_t idx = grid->index(i, j, k);
        const Vec3 x = grid->position(idx);
        if (std::abs(x[0] - x1) > 1e-12 || std::abs(x[1] - x2) > 1e-12 || std::abs(x[2] - x3) > 1e-12) {
            throw ConfigError("field CSV: coordinates do not match the grid");
        }
        out.set(idx, v);
        ++rows;
    }
    if (rows != grid->interior().size()) {
        throw ConfigError("field CSV: expected " + std::to_string(grid->interior().size()) +
                          " interior rows, got " + std::to_string(rows));
    }
    return out;
}

}  // namespace hess2
