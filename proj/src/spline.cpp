#include "flexoiga/spline.hpp"

#include "flexoiga/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace flexoiga {

KnotVector::KnotVector(int degree, std::vector<double> knots) : degree_(degree), knots_(std::move(knots)) {
  require(degree_ >= 1, ErrorKind::InvalidArgument, "knot vector degree must be >= 1");
  require(static_cast<int>(knots_.size()) >= 2 * (degree_ + 1), ErrorKind::InvalidArgument,
          "knot vector needs at least 2(p+1) knots");
  require(std::is_sorted(knots_.begin(), knots_.end()), ErrorKind::InvalidArgument,
          "knot vector must be non-decreasing");
  require(knots_.back() > knots_.front(), ErrorKind::InvalidArgument, "knot vector has zero length");
  for (int k = 0; k <= degree_; ++k) {
    require(knots_[k] == knots_.front() && knots_[knots_.size() - 1 - k] == knots_.back(),
            ErrorKind::InvalidArgument, "knot vector must be open (end knots repeated p+1 times)");
  }
  for (std::size_t i = 0; i < knots_.size();) {
    std::size_t j = i;
    while (j < knots_.size() && knots_[j] == knots_[i]) ++j;
    if (knots_[i] != knots_.front() && knots_[i] != knots_.back()) {
      require(static_cast<int>(j - i) <= degree_, ErrorKind::InvalidArgument,
              "interior knot multiplicity exceeds degree");
    }
    i = j;
  }
}

std::vector<double> KnotVector::breakpoints() const {
  std::vector<double> out;
  for (double k : knots_) {
    if (out.empty() || k > out.back()) out.push_back(k);
  }
  return out;
}

int KnotVector::find_span(double xi) const {
  const int n = num_basis();
  if (xi >= knots_[n]) return n - 1;
  if (xi <= knots_[degree_]) return degree_;
  // upper_bound gives the first knot > xi, so the span is one before it.
  auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n + 1, xi);
  return static_cast<int>(it - knots_.begin()) - 1;
}

KnotVector make_open_knot_vector(int degree, int n_ctrl) {
  require(degree >= 1, ErrorKind::InvalidArgument, "degree must be >= 1");
  require(n_ctrl >= degree + 1, ErrorKind::InvalidArgument,
          "need at least degree+1 control points, got " + std::to_string(n_ctrl));
  const int n_el = n_ctrl - degree;
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(n_ctrl + degree + 1));
  knots.insert(knots.end(), static_cast<std::size_t>(degree + 1), 0.0);
  for (int i = 1; i < n_el; ++i) knots.push_back(static_cast<double>(i) / n_el);
  knots.insert(knots.end(), static_cast<std::size_t>(degree + 1), 1.0);
  return KnotVector(degree, std::move(knots));
}

KnotVector make_uniform_knot_vector(int degree, int n_elements) {
  require(n_elements >= 1, ErrorKind::InvalidArgument, "need at least one element");
  return make_open_knot_vector(degree, n_elements + degree);
}

BasisEval bspline_basis(const KnotVector& kv, double xi, int n_derivs) {
  require(n_derivs >= 0 && n_derivs <= 2, ErrorKind::InvalidArgument, "n_derivs must be 0, 1 or 2");
  require(xi >= kv.front() && xi <= kv.back(), ErrorKind::OutOfDomain,
          "parameter " + std::to_string(xi) + " outside knot range");
  const int p = kv.degree();
  const auto& U = kv.knots();
  const int span = kv.find_span(xi);

  // The NURBS Book, A2.3.
  std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1, 0.0));
  std::vector<double> left(p + 1), right(p + 1);
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = xi - U[span + 1 - j];
    right[j] = U[span + j] - xi;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }

  BasisEval out;
  out.span = span;
  out.degree = p;
  out.values.resize(p + 1);
  for (int j = 0; j <= p; ++j) out.values[j] = ndu[j][p];
  if (n_derivs == 0) return out;

  const int nd = std::min(n_derivs, p);
  std::vector<std::vector<double>> ders(n_derivs + 1, std::vector<double>(p + 1, 0.0));
  std::vector<std::vector<double>> a(2, std::vector<double>(p + 1, 0.0));
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= nd; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      ders[k][r] = d;
      std::swap(s1, s2);
    }
  }
  int factor = p;
  for (int k = 1; k <= nd; ++k) {
    for (int j = 0; j <= p; ++j) ders[k][j] *= factor;
    factor *= (p - k);
  }
  out.d1 = ders[1];
  if (n_derivs >= 2) out.d2 = ders[2];
  return out;
}

NurbsBasis2D combine_nurbs(const PatchBasisSpec& spec, std::span<const double> weights,
                           const BasisEval& bx, const BasisEval& by, int n_derivs) {
  const int nx = spec.num_xi();
  const int px = spec.xi.degree(), py = spec.eta.degree();
  const std::size_t n_loc = static_cast<std::size_t>((px + 1) * (py + 1));
  NurbsBasis2D out;
  out.indices.resize(n_loc);
  out.R.resize(n_loc);
  out.weights.resize(n_loc);
  if (n_derivs >= 1) out.dR.resize(n_loc);
  if (n_derivs >= 2) out.d2R.resize(n_loc);

  // Weighted tensor products and the weight function W with its derivatives.
  double W = 0, Wx = 0, Wy = 0, Wxx = 0, Wxy = 0, Wyy = 0;
  std::size_t k = 0;
  for (int j = 0; j <= py; ++j) {
    for (int i = 0; i <= px; ++i, ++k) {
      const int idx = (bx.first() + i) + nx * (by.first() + j);
      const double w = weights[static_cast<std::size_t>(idx)];
      require(w > 0.0, ErrorKind::InvalidArgument, "NURBS weights must be positive");
      out.indices[k] = idx;
      out.weights[k] = w;
      const double nm = bx.values[i] * by.values[j] * w;
      out.R[k] = nm;
      W += nm;
      if (n_derivs >= 1) {
        const double fx = bx.d1[i] * by.values[j] * w;
        const double fy = bx.values[i] * by.d1[j] * w;
        out.dR[k] = {fx, fy};
        Wx += fx;
        Wy += fy;
      }
      if (n_derivs >= 2) {
        const double fxx = bx.d2[i] * by.values[j] * w;
        const double fxy = bx.d1[i] * by.d1[j] * w;
        const double fyy = bx.values[i] * by.d2[j] * w;
        out.d2R[k] = {fxx, fxy, fyy};
        Wxx += fxx;
        Wxy += fxy;
        Wyy += fyy;
      }
    }
  }

  // Quotient rule.
  const double invW = 1.0 / W;
  for (std::size_t a = 0; a < n_loc; ++a) {
    const double R = out.R[a] * invW;
    if (n_derivs >= 1) {
      const double Rx = (out.dR[a][0] - R * Wx) * invW;
      const double Ry = (out.dR[a][1] - R * Wy) * invW;
      if (n_derivs >= 2) {
        const auto [fxx, fxy, fyy] = out.d2R[a];
        out.d2R[a] = {(fxx - 2.0 * Rx * Wx - R * Wxx) * invW,
                      (fxy - Rx * Wy - Ry * Wx - R * Wxy) * invW,
                      (fyy - 2.0 * Ry * Wy - R * Wyy) * invW};
      }
      out.dR[a] = {Rx, Ry};
    }
    out.R[a] = R;
  }
  return out;
}

NurbsBasis2D nurbs_basis_2d(const PatchBasisSpec& spec, std::span<const double> weights, double xi,
                            double eta, int n_derivs) {
  require(static_cast<int>(weights.size()) == spec.num_basis(), ErrorKind::InvalidArgument,
          "weight count does not match basis size");
  const BasisEval bx = bspline_basis(spec.xi, xi, n_derivs);
  const BasisEval by = bspline_basis(spec.eta, eta, n_derivs);
  return combine_nurbs(spec, weights, bx, by, n_derivs);
}

QuadratureRule gauss_rule(int n) {
  require(n >= 1 && n <= 16, ErrorKind::InvalidArgument, "Gauss rule size must be in [1, 16]");
  QuadratureRule rule;
  rule.points.assign(n, 0.0);
  rule.weights.assign(n, 2.0);
  if (n == 1) return rule;
  // Newton iteration on the Legendre polynomial P_n.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

Eigen::VectorXd bernstein_basis(int degree, double t, int deriv) {
  require(deriv >= 0 && deriv <= 2, ErrorKind::InvalidArgument, "Bernstein derivative order must be <= 2");
  auto eval = [t](int p) {
    Eigen::VectorXd B = Eigen::VectorXd::Zero(p + 1);
    if (p < 0) return B;
    B(0) = 1.0;
    for (int j = 1; j <= p; ++j) {
      double saved = 0.0;
      for (int k = 0; k < j; ++k) {
        const double temp = B(k);
        B(k) = saved + (1.0 - t) * temp;
        saved = t * temp;
      }
      B(j) = saved;
    }
    return B;
  };
  const int p = degree;
  if (deriv == 0) return eval(p);
  // d/dt B_k^p = p (B_{k-1}^{p-1} - B_k^{p-1}), applied once or twice.
  auto lower_derivative = [](const Eigen::VectorXd& low, int p) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(p + 1);
    for (int k = 0; k <= p; ++k) {
      const double a = k >= 1 ? low(k - 1) : 0.0;
      const double b = k <= p - 1 ? low(k) : 0.0;
      d(k) = p * (a - b);
    }
    return d;
  };
  if (deriv == 1) return p >= 1 ? lower_derivative(eval(p - 1), p) : Eigen::VectorXd::Zero(p + 1);
  if (p < 2) return Eigen::VectorXd::Zero(p + 1);
  return lower_derivative(lower_derivative(eval(p - 2), p - 1), p);
}

BezierExtraction bezier_extract(const KnotVector& kv) {
  // Knot insertion form of the extraction algorithm (Borden et al.), written
  // with 1-based indices to stay close to the published listing.
  const int p = kv.degree();
  const auto& knots = kv.knots();
  const int m = static_cast<int>(knots.size());
  auto U = [&](int i) { return knots[static_cast<std::size_t>(i - 1)]; };

  const int n_el = kv.num_elements();
  std::vector<Eigen::MatrixXd> C;
  C.reserve(static_cast<std::size_t>(n_el) + 1);
  C.push_back(Eigen::MatrixXd::Identity(p + 1, p + 1));

  int a = p + 1;
  int b = a + 1;
  int nb = 1;
  std::vector<double> alphas(static_cast<std::size_t>(p) + 1, 0.0);
  while (b < m) {
    C.push_back(Eigen::MatrixXd::Identity(p + 1, p + 1));
    const int i = b;
    while (b < m && U(b + 1) == U(b)) ++b;
    const int mult = b - i + 1;
    if (mult < p) {
      const double numer = U(b) - U(a);
      for (int j = p; j >= mult + 1; --j) alphas[j - mult] = numer / (U(a + j) - U(a));
      const int r = p - mult;
      for (int j = 1; j <= r; ++j) {
        const int save = r - j + 1;
        const int s = mult + j;
        auto& Cn = C[static_cast<std::size_t>(nb - 1)];
        for (int k = p + 1; k >= s + 1; --k) {
          const double alpha = alphas[k - s];
          Cn.col(k - 1) = alpha * Cn.col(k - 1) + (1.0 - alpha) * Cn.col(k - 2);
        }
        if (b < m) {
          auto& Cnext = C[static_cast<std::size_t>(nb)];
          for (int t = 0; t <= j; ++t) Cnext(save - 1 + t, save - 1) = Cn(p - j + t, p);
        }
      }
    }
    ++nb;
    if (b < m) {
      a = b;
      ++b;
    }
  }
  C.resize(static_cast<std::size_t>(n_el));

  BezierExtraction out;
  out.degree = p;
  out.operators = std::move(C);
  const auto bp = kv.breakpoints();
  for (int e = 0; e < n_el; ++e) {
    out.element_bounds.push_back({bp[e], bp[e + 1]});
    const double mid = 0.5 * (bp[e] + bp[e + 1]);
    out.first_basis.push_back(kv.find_span(mid) - p);
  }
  return out;
}

BasisEval extracted_basis(const BezierExtraction& ext, int element, double t, int n_derivs) {
  require(element >= 0 && element < ext.num_elements(), ErrorKind::OutOfDomain, "element index out of range");
  const auto& C = ext.operators[static_cast<std::size_t>(element)];
  const auto [x0, x1] = ext.element_bounds[static_cast<std::size_t>(element)];
  const double inv_len = 1.0 / (x1 - x0);
  BasisEval out;
  out.degree = ext.degree;
  out.span = ext.first_basis[static_cast<std::size_t>(element)] + ext.degree;
  const Eigen::VectorXd N = C * bernstein_basis(ext.degree, t, 0);
  out.values.assign(N.data(), N.data() + N.size());
  if (n_derivs >= 1) {
    const Eigen::VectorXd d1 = C * bernstein_basis(ext.degree, t, 1) * inv_len;
    out.d1.assign(d1.data(), d1.data() + d1.size());
  }
  if (n_derivs >= 2) {
    const Eigen::VectorXd d2 = C * bernstein_basis(ext.degree, t, 2) * (inv_len * inv_len);
    out.d2.assign(d2.data(), d2.data() + d2.size());
  }
  return out;
}

UnivariateTable tabulate_basis(const KnotVector& kv, const QuadratureRule& rule, int n_derivs) {
  const BezierExtraction ext = bezier_extract(kv);
  UnivariateTable table;
  table.rule = rule;
  const std::size_t ng = rule.size();
  table.evals.reserve(static_cast<std::size_t>(ext.num_elements()) * ng);
  for (int e = 0; e < ext.num_elements(); ++e) {
    const auto [x0, x1] = ext.element_bounds[static_cast<std::size_t>(e)];
    table.element_lengths.push_back(x1 - x0);
    for (std::size_t g = 0; g < ng; ++g) {
      const double t = 0.5 * (rule.points[g] + 1.0);
      table.evals.push_back(extracted_basis(ext, e, t, n_derivs));
      table.params.push_back(x0 + t * (x1 - x0));
    }
  }
  return table;
}

}  // namespace flexoiga
