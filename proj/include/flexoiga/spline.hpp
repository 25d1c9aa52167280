#pragma once

// Univariate B-splines, tensor-product NURBS bases, Gauss-Legendre rules and
// Bezier extraction. Everything here is a pure function of its inputs.

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

namespace flexoiga {

/// Open (clamped) knot vector together with its polynomial degree.
class KnotVector {
 public:
  KnotVector() = default;
  /// Validates: degree >= 1, non-decreasing, first/last knot repeated degree+1
  /// times and at least degree+1 basis functions.
  KnotVector(int degree, std::vector<double> knots);

  int degree() const { return degree_; }
  const std::vector<double>& knots() const { return knots_; }
  int num_basis() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }

  /// Distinct knot values (element boundaries).
  std::vector<double> breakpoints() const;
  int num_elements() const { return static_cast<int>(breakpoints().size()) - 1; }

  /// Index i with knots[i] <= xi < knots[i+1]; the last non-empty span at the
  /// right end of the domain.
  int find_span(double xi) const;

  bool operator==(const KnotVector&) const = default;

 private:
  int degree_ = 0;
  std::vector<double> knots_;
};

/// Uniform open knot vector on [0, 1] with n_ctrl basis functions.
KnotVector make_open_knot_vector(int degree, int n_ctrl);

/// Uniform open knot vector on [0, 1] with the given number of elements.
KnotVector make_uniform_knot_vector(int degree, int n_elements);

/// Nonzero basis functions N_{span-p..span} at one parameter value.
struct BasisEval {
  int span = 0;
  int degree = 0;
  std::vector<double> values;
  std::vector<double> d1;
  std::vector<double> d2;

  int first() const { return span - degree; }
};

/// Cox-de Boor evaluation of the p+1 nonzero functions and up to two derivatives.
BasisEval bspline_basis(const KnotVector& kv, double xi, int n_derivs = 0);

struct PatchBasisSpec {
  KnotVector xi;
  KnotVector eta;

  int num_xi() const { return xi.num_basis(); }
  int num_eta() const { return eta.num_basis(); }
  int num_basis() const { return num_xi() * num_eta(); }
};

/// Rational basis over the local (p+1)(q+1) support. Second derivatives are
/// stored as (xi xi, xi eta, eta eta). Control points are numbered i + n_xi * j.
struct NurbsBasis2D {
  std::vector<int> indices;
  std::vector<double> R;
  std::vector<std::array<double, 2>> dR;
  std::vector<std::array<double, 3>> d2R;
  std::vector<double> weights;

  std::size_t size() const { return R.size(); }
};

NurbsBasis2D nurbs_basis_2d(const PatchBasisSpec& spec, std::span<const double> weights, double xi,
                            double eta, int n_derivs = 0);

/// Tensor-product combination of already evaluated univariate bases.
NurbsBasis2D combine_nurbs(const PatchBasisSpec& spec, std::span<const double> weights,
                           const BasisEval& bx, const BasisEval& by, int n_derivs);

struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1], 1 <= n <= 16.
QuadratureRule gauss_rule(int n);

/// Bernstein polynomials of degree p on [0, 1]; deriv selects 0, 1 or 2.
Eigen::VectorXd bernstein_basis(int degree, double t, int deriv = 0);

/// Per-element operators C_e with N_e(xi) = C_e * B(t), t the element-local
/// coordinate in [0, 1].
struct BezierExtraction {
  int degree = 0;
  std::vector<Eigen::MatrixXd> operators;
  std::vector<std::array<double, 2>> element_bounds;
  std::vector<int> first_basis;

  int num_elements() const { return static_cast<int>(operators.size()); }
};

BezierExtraction bezier_extract(const KnotVector& kv);

/// Basis values (and parametric derivatives) on one element through its extraction operator.
BasisEval extracted_basis(const BezierExtraction& ext, int element, double t, int n_derivs = 0);

/// Univariate values at every Gauss point of every element, computed once
/// through Bezier extraction.
struct UnivariateTable {
  QuadratureRule rule;
  std::vector<double> element_lengths;
  /// evals[e * rule.size() + g]
  std::vector<BasisEval> evals;
  /// Parameter value of each entry in evals.
  std::vector<double> params;

  const BasisEval& at(int element, int gauss) const {
    return evals[static_cast<std::size_t>(element) * rule.size() + static_cast<std::size_t>(gauss)];
  }
};

UnivariateTable tabulate_basis(const KnotVector& kv, const QuadratureRule& rule, int n_derivs);

}  // namespace flexoiga
