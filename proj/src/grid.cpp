#include "vexp/grid.hpp"

#include "vexp/common.hpp"

#include <cmath>
#include <string>

namespace vexp {

Grid::Grid(int dimension, std::vector<std::pair<double, double>> bounds, std::vector<std::size_t> nodes_per_axis)
    : dimension_(dimension), bounds_(std::move(bounds)), nodes_(std::move(nodes_per_axis))
{
    if (dimension_ != 1 && dimension_ != 2) {
        throw ConstructionError("grid dimension must be 1 or 2, got " + std::to_string(dimension_));
    }
    if (bounds_.size() != static_cast<std::size_t>(dimension_) || nodes_.size() != static_cast<std::size_t>(dimension_)) {
        throw ConstructionError("grid needs one bounds pair and one node count per axis");
    }
    cell_measure_ = 1.0;
    for (int a = 0; a < dimension_; ++a) {
        const auto [lo, hi] = bounds_[a];
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
            throw ConstructionError("degenerate bounds on axis " + std::to_string(a));
        }
        if (nodes_[a] < 3) {
            throw ConstructionError("need at least 3 nodes on axis " + std::to_string(a));
        }
        spacing_.push_back((hi - lo) / static_cast<double>(nodes_[a] - 1));
        cell_measure_ *= spacing_.back();
    }

    const std::size_t nx = nodes_[0];
    const std::size_t ny = dimension_ == 2 ? nodes_[1] : 1;
    boundary_.assign(nx * ny, 0);
    weights_.assign(nx * ny, 0.0);
    interior_position_.assign(nx * ny, -1);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t k = node_index(i, j);
            const bool edge_x = i == 0 || i + 1 == nx;
            const bool edge_y = dimension_ == 2 && (j == 0 || j + 1 == ny);
            boundary_[k] = (edge_x || edge_y) ? 1 : 0;
            weights_[k] = cell_measure_ * (edge_x ? 0.5 : 1.0) * (edge_y ? 0.5 : 1.0);
            if (!boundary_[k]) {
                interior_position_[k] = static_cast<std::ptrdiff_t>(interior_.size());
                interior_.push_back(k);
            }
        }
    }

    if (dimension_ == 1) {
        const double h = spacing_[0];
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            Element e;
            e.vertex_count = 2;
            e.nodes = {i, i + 1, 0};
            e.basis_gradient[0] = {-1.0 / h, 0.0};
            e.basis_gradient[1] = {1.0 / h, 0.0};
            e.measure = h;
            elements_.push_back(e);
        }
        return;
    }

    const double hx = spacing_[0];
    const double hy = spacing_[1];
    for (std::size_t j = 0; j + 1 < ny; ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            const std::size_t n00 = node_index(i, j);
            const std::size_t n10 = node_index(i + 1, j);
            const std::size_t n01 = node_index(i, j + 1);
            const std::size_t n11 = node_index(i + 1, j + 1);
            Element lower;
            lower.vertex_count = 3;
            lower.nodes = {n00, n10, n01};
            lower.basis_gradient = {{{-1.0 / hx, -1.0 / hy}, {1.0 / hx, 0.0}, {0.0, 1.0 / hy}}};
            lower.measure = 0.5 * hx * hy;
            Element upper;
            upper.vertex_count = 3;
            upper.nodes = {n11, n01, n10};
            upper.basis_gradient = {{{1.0 / hx, 1.0 / hy}, {-1.0 / hx, 0.0}, {0.0, -1.0 / hy}}};
            upper.measure = 0.5 * hx * hy;
            elements_.push_back(lower);
            elements_.push_back(upper);
        }
    }
}

double Grid::domain_measure() const noexcept
{
    double m = 1.0;
    for (const auto& [lo, hi] : bounds_) {
        m *= hi - lo;
    }
    return m;
}

double Grid::coordinate(std::size_t node, int axis) const
{
    const std::size_t i = axis == 0 ? node % nodes_[0] : node / nodes_[0];
    return bounds_.at(axis).first + spacing_.at(axis) * static_cast<double>(i);
}

GridPtr build_grid(int dimension, std::vector<std::pair<double, double>> bounds, std::vector<std::size_t> nodes_per_axis)
{
    return std::make_shared<const Grid>(dimension, std::move(bounds), std::move(nodes_per_axis));
}

bool same_grid(const GridPtr& a, const GridPtr& b) noexcept
{
    if (a == b) {
        return true;
    }
    return a && b && *a == *b;
}

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* what)
{
    if (!same_grid(a, b)) {
        throw GridMismatch(std::string(what) + ": operands live on different grids");
    }
}

} // namespace vexp
