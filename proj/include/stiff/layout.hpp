#pragma once

#include "stiff/generator.hpp"
#include "stiff/grid.hpp"

namespace stiff {

// How the two boundary rows enter the unknowns.
//   merged: one shared barrier row (continuous fields, phases I and IV, the layer problem)
//   split: two independent boundary rows
//   dirichlet: both boundary rows held at zero
enum class BarrierKind { merged, split, dirichlet };

class Layout {
 public:
  Layout(const SplitGrid& g, BarrierKind kind);

  const SplitGrid& grid() const { return grid_; }
  BarrierKind kind() const { return kind_; }
  Eigen::Index size() const { return size_; }
  // Unknown index of node (side, row j, column i); -1 for nodes held at zero.
  Eigen::Index index(Side s, int j, int i) const;
  // x2-weight of row j on side s as seen by the unknowns (merged row: dy).
  double row_weight(Side s, int j) const;
  Eigen::VectorXd mass() const;

  // Merged layouts store the mean of the two boundary rows.
  Eigen::VectorXd pack(const SplitField& f) const;
  SplitField unpack(const Eigen::VectorXd& u) const;

 private:
  SplitGrid grid_;
  BarrierKind kind_;
  Eigen::Index size_;
  Eigen::Index row_len_;
};

// Generator on a grid layout.
struct LinearOperator {
  Layout layout;
  Generator gen;

  Eigen::Index size() const { return gen.size(); }
  // Op f = -M^{-1} K f on the unknowns, returned as a field.
  SplitField apply(const SplitField& f) const;
};

using RowCoefficient = std::function<double(Side, int)>;

// Five-point pair form of (1/2) div(A grad) on a layout. coef_tan(s, j) is the
// x1-conductivity of the cell around row j; coef_norm(s, j) the x2-conductivity of the
// edge between rows j and j+1. Coefficient 1 gives the plain half Laplacian.
void add_diffusion(const Layout& layout, const RowCoefficient& coef_tan, const RowCoefficient& coef_norm,
                   StiffnessBuilder& builder);
void add_half_laplacian(const Layout& layout, StiffnessBuilder& builder);

}  // namespace stiff
