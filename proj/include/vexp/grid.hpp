#pragma once

#include "vexp/common.hpp"

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace vexp {

/// Linear simplex of the mesh: a 1D interval or, in 2D, one half of a grid
/// rectangle. Gradients of the nodal basis are constant on it.
struct Element {
    std::array<std::size_t, 3> nodes{};
    /// Gradient of the nodal basis function of each vertex, (d/dx, d/dy).
    std::array<std::array<double, 2>, 3> basis_gradient{};
    std::size_t vertex_count = 0;
    double measure = 0.0;
};

/// Uniform tensor grid on an interval or axis-aligned rectangle.
///
/// Node numbering is lexicographic with the first axis fastest. Rectangles
/// are split along the (i+1,j)-(i,j+1) diagonal into two linear triangles.
/// Immutable after construction; share through GridPtr.
class Grid {
public:
    Grid(int dimension, std::vector<std::pair<double, double>> bounds, std::vector<std::size_t> nodes_per_axis);

    [[nodiscard]] int dimension() const noexcept { return dimension_; }
    [[nodiscard]] std::pair<double, double> bounds(int axis) const { return bounds_.at(axis); }
    [[nodiscard]] std::size_t nodes_per_axis(int axis) const { return nodes_.at(axis); }
    [[nodiscard]] double spacing(int axis) const { return spacing_.at(axis); }
    /// Measure of one grid cell (product of spacings).
    [[nodiscard]] double cell_measure() const noexcept { return cell_measure_; }
    [[nodiscard]] double domain_measure() const noexcept;

    [[nodiscard]] std::size_t node_count() const noexcept { return boundary_.size(); }
    [[nodiscard]] std::size_t interior_count() const noexcept { return interior_.size(); }
    [[nodiscard]] std::size_t node_index(std::size_t i, std::size_t j = 0) const noexcept { return i + nodes_[0] * j; }
    [[nodiscard]] double coordinate(std::size_t node, int axis) const;
    [[nodiscard]] bool is_boundary(std::size_t node) const { return boundary_.at(node) != 0; }
    [[nodiscard]] std::span<const char> boundary_mask() const noexcept { return boundary_; }

    /// Interior nodes in increasing node order.
    [[nodiscard]] std::span<const std::size_t> interior_nodes() const noexcept { return interior_; }
    /// Position of `node` in interior_nodes(), or -1 for boundary nodes.
    [[nodiscard]] std::ptrdiff_t interior_position(std::size_t node) const { return interior_position_.at(node); }

    /// Tensor trapezoidal weights; interior nodes carry cell_measure().
    [[nodiscard]] std::span<const double> node_weights() const noexcept { return weights_; }
    [[nodiscard]] std::span<const Element> elements() const noexcept { return elements_; }

    friend bool operator==(const Grid& a, const Grid& b) noexcept
    {
        return a.dimension_ == b.dimension_ && a.bounds_ == b.bounds_ && a.nodes_ == b.nodes_;
    }

private:
    int dimension_;
    std::vector<std::pair<double, double>> bounds_;
    std::vector<std::size_t> nodes_;
    std::vector<double> spacing_;
    double cell_measure_ = 0.0;
    std::vector<char> boundary_;
    std::vector<std::size_t> interior_;
    std::vector<std::ptrdiff_t> interior_position_;
    std::vector<double> weights_;
    std::vector<Element> elements_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Throws ConstructionError on degenerate bounds, fewer than 3 nodes per
/// axis, or a dimension other than 1 or 2.
GridPtr build_grid(int dimension, std::vector<std::pair<double, double>> bounds, std::vector<std::size_t> nodes_per_axis);

/// Structural equality, tolerant of distinct but identical grid objects.
bool same_grid(const GridPtr& a, const GridPtr& b) noexcept;
void require_same_grid(const GridPtr& a, const GridPtr& b, const char* what);

} // namespace vexp
