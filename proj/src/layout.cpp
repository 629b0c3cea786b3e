#include "stiff/layout.hpp"

#include "stiff/errors.hpp"

namespace stiff {

Layout::Layout(const SplitGrid& g, BarrierKind kind) : grid_(g), kind_(kind), row_len_(g.nx + 1) {
  const Eigen::Index rows = static_cast<Eigen::Index>(g.ny) + 1;
  switch (kind) {
    case BarrierKind::merged: size_ = (2 * rows - 1) * row_len_; break;
    case BarrierKind::split: size_ = 2 * rows * row_len_; break;
    case BarrierKind::dirichlet: size_ = 2 * (rows - 1) * row_len_; break;
  }
}

Eigen::Index Layout::index(Side s, int j, int i) const {
  const Eigen::Index rows = static_cast<Eigen::Index>(grid_.ny) + 1;
  switch (kind_) {
    case BarrierKind::merged:
      if (s == Side::plus || j == 0) return j * row_len_ + i;
      return (rows + j - 1) * row_len_ + i;
    case BarrierKind::split:
      return ((s == Side::plus ? 0 : rows) + j) * row_len_ + i;
    case BarrierKind::dirichlet:
      if (j == 0) return -1;
      return ((s == Side::plus ? 0 : rows - 1) + j - 1) * row_len_ + i;
  }
  return -1;
}

double Layout::row_weight(Side, int j) const {
  if (j == 0 && kind_ == BarrierKind::merged) return grid_.dy();
  return grid_.wy(j);
}

Eigen::VectorXd Layout::mass() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(size_);
  for (Side s : {Side::plus, Side::minus})
    for (int j = 0; j <= grid_.ny; ++j)
      for (int i = 0; i <= grid_.nx; ++i) {
        const Eigen::Index k = index(s, j, i);
        if (k >= 0) m[k] = grid_.wx(i) * row_weight(s, j);
      }
  return m;
}

Eigen::VectorXd Layout::pack(const SplitField& f) const {
  if (!(f.grid == grid_)) throw GridError("field grid does not match the operator grid");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(size_);
  for (Side s : {Side::plus, Side::minus})
    for (int j = 0; j <= grid_.ny; ++j)
      for (int i = 0; i <= grid_.nx; ++i) {
        const Eigen::Index k = index(s, j, i);
        if (k < 0) continue;
        if (j == 0 && kind_ == BarrierKind::merged)
          u[k] = 0.5 * (f.upper(0, i) + f.lower(0, i));
        else
          u[k] = f.half(s)(j, i);
      }
  return u;
}

SplitField Layout::unpack(const Eigen::VectorXd& u) const {
  if (u.size() != size_) throw GridError("vector length does not match the layout");
  SplitField f(grid_);
  for (Side s : {Side::plus, Side::minus})
    for (int j = 0; j <= grid_.ny; ++j)
      for (int i = 0; i <= grid_.nx; ++i) {
        const Eigen::Index k = index(s, j, i);
        f.half(s)(j, i) = k >= 0 ? u[k] : 0.0;
      }
  return f;
}

SplitField LinearOperator::apply(const SplitField& f) const { return layout.unpack(gen.apply(layout.pack(f))); }

void add_diffusion(const Layout& layout, const RowCoefficient& coef_tan, const RowCoefficient& coef_norm,
                   StiffnessBuilder& b) {
  const SplitGrid& g = layout.grid();
  const double dx = g.dx(), dy = g.dy();
  for (Side s : {Side::plus, Side::minus}) {
    for (int j = 0; j <= g.ny; ++j) {
      const double gx = 0.5 * coef_tan(s, j) * g.wy(j) / dx;
      for (int i = 0; i < g.nx; ++i) b.add_pair(layout.index(s, j, i), layout.index(s, j, i + 1), gx);
    }
    for (int j = 0; j < g.ny; ++j) {
      const double c = 0.5 * coef_norm(s, j) / dy;
      for (int i = 0; i <= g.nx; ++i) b.add_pair(layout.index(s, j, i), layout.index(s, j + 1, i), c * g.wx(i));
    }
  }
}

void add_half_laplacian(const Layout& layout, StiffnessBuilder& b) {
  const auto one = [](Side, int) { return 1.0; };
  add_diffusion(layout, one, one, b);
}

}  // namespace stiff
