#include "slpoly/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>

namespace slpoly {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOverflowLimit = 1e150;
constexpr double kGaussOffset = 0.28867513459481287;  // sqrt(3)/6

struct State {
  Complex y;
  Complex yq;
};

// One cell of the fourth-order commutator-corrected exponential scheme. The
// cell matrix is traceless, so its exponential has the closed form
// cosh(theta)*I + sinhc(theta)*Omega with theta^2 = O11^2 + O12*O21.
State advance(State s, Complex lambda, Complex s1, Complex s2, double h) {
  Complex p = s1 + s2;
  Complex q = s1 * s2;
  Complex sum_sq = s1 * s1 + s2 * s2;
  Complex d = s2 - s1;
  double c = std::numbers::sqrt3 * h * h / 12.0;
  Complex o11 = 0.5 * h * p + c * d * p;
  Complex o12 = h + 2.0 * c * d;
  Complex o21 = -0.5 * h * (sum_sq + 2.0 * lambda) + 2.0 * c * d * (lambda - q);
  Complex theta = std::sqrt(o11 * o11 + o12 * o21);
  Complex ch = std::cosh(theta);
  Complex shc;
  if (std::abs(theta) < 1e-4) {
    Complex t2 = theta * theta;
    shc = 1.0 + t2 / 6.0 + t2 * t2 / 120.0;
  } else {
    shc = std::sinh(theta) / theta;
  }
  return State{ch * s.y + shc * (o11 * s.y + o12 * s.yq),
               ch * s.yq + shc * (o21 * s.y - o11 * s.yq)};
}

void check_overflow(const State& s, Complex lambda) {
  if (std::abs(s.y) > kOverflowLimit || std::abs(s.yq) > kOverflowLimit)
    fail(Err::Overflow,
         "solution magnitude passed 1e150 at lambda = " +
             std::to_string(lambda.real()) + "+" +
             std::to_string(lambda.imag()) + "i");
}

// Sigma at the two Gauss points of cell j, in traversal order.
std::pair<Complex, Complex> gauss_sigma(const SampledFunction& sigma, int j,
                                        bool forward) {
  Complex a = sigma.value(j);
  Complex b = sigma.value(j + 1);
  double c1 = 0.5 - kGaussOffset;
  double c2 = 0.5 + kGaussOffset;
  Complex at1 = (1.0 - c1) * a + c1 * b;
  Complex at2 = (1.0 - c2) * a + c2 * b;
  if (forward) return {at1, at2};
  return {at2, at1};
}

template <bool Store>
State propagate(const SampledFunction& sigma, Complex lambda, Anchor anchor,
                State start, std::vector<Complex>* y_out,
                std::vector<Complex>* yq_out) {
  const Grid& grid = sigma.grid();
  int m = grid.intervals();
  double h = grid.spacing();
  State s = start;
  if (anchor == Anchor::Left) {
    if constexpr (Store) {
      (*y_out)[0] = s.y;
      (*yq_out)[0] = s.yq;
    }
    for (int j = 0; j < m; ++j) {
      auto [s1, s2] = gauss_sigma(sigma, j, true);
      s = advance(s, lambda, s1, s2, h);
      check_overflow(s, lambda);
      if constexpr (Store) {
        (*y_out)[static_cast<size_t>(j + 1)] = s.y;
        (*yq_out)[static_cast<size_t>(j + 1)] = s.yq;
      }
    }
  } else {
    if constexpr (Store) {
      (*y_out)[static_cast<size_t>(m)] = s.y;
      (*yq_out)[static_cast<size_t>(m)] = s.yq;
    }
    for (int j = m - 1; j >= 0; --j) {
      auto [s1, s2] = gauss_sigma(sigma, j, false);
      s = advance(s, lambda, s1, s2, -h);
      check_overflow(s, lambda);
      if constexpr (Store) {
        (*y_out)[static_cast<size_t>(j)] = s.y;
        (*yq_out)[static_cast<size_t>(j)] = s.yq;
      }
    }
  }
  return s;
}

State endpoint(const SampledFunction& sigma, Complex lambda, Anchor anchor,
               State start) {
  return propagate<false>(sigma, lambda, anchor, start, nullptr, nullptr);
}

State psi_start(const BoundaryProblem& problem, Complex lambda) {
  return State{poly_eval(problem.boundary.r1, lambda),
               -poly_eval(problem.boundary.r2, lambda)};
}

}  // namespace

SolutionTable solve_ivp(const SampledFunction& sigma, Complex lambda,
                        Anchor anchor, Complex y0, Complex yq0) {
  SolutionTable table{sigma.grid(), lambda,
                      std::vector<Complex>(static_cast<size_t>(sigma.grid().point_count())),
                      std::vector<Complex>(static_cast<size_t>(sigma.grid().point_count()))};
  propagate<true>(sigma, lambda, anchor, State{y0, yq0}, &table.y, &table.yq);
  return table;
}

SolutionTable phi_table(const BoundaryProblem& problem, Complex lambda) {
  return solve_ivp(problem.sigma, lambda, Anchor::Left, 1.0, 0.0);
}

SolutionTable psi_table(const BoundaryProblem& problem, Complex lambda) {
  State s = psi_start(problem, lambda);
  return solve_ivp(problem.sigma, lambda, Anchor::Right, s.y, s.yq);
}

Complex characteristic(const BoundaryProblem& problem, Complex lambda) {
  State end = endpoint(problem.sigma, lambda, Anchor::Left, State{1.0, 0.0});
  return poly_eval(problem.boundary.r1, lambda) * end.yq +
         poly_eval(problem.boundary.r2, lambda) * end.y;
}

Complex characteristic_from_right(const BoundaryProblem& problem,
                                  Complex lambda) {
  State end =
      endpoint(problem.sigma, lambda, Anchor::Right, psi_start(problem, lambda));
  return -end.yq;
}

Complex weyl_function(const BoundaryProblem& problem, Complex lambda) {
  State end =
      endpoint(problem.sigma, lambda, Anchor::Right, psi_start(problem, lambda));
  double scale = std::max(1.0, std::pow(std::abs(lambda), problem.degree()));
  if (std::abs(end.yq) < 1e-6 * scale)
    fail(Err::NearPole, "Weyl function evaluated too close to a pole at " +
                            std::to_string(lambda.real()) + "+" +
                            std::to_string(lambda.imag()) + "i");
  return end.y / end.yq;
}

Complex contour_moment(const BoundaryProblem& problem, Complex center,
                       double radius, int moment, int nodes) {
  if (radius <= 0.0 || nodes < 8)
    fail(Err::BadValue, "contour needs a positive radius and >= 8 nodes");
  Complex acc = 0.0;
  for (int k = 0; k < nodes; ++k) {
    double angle = 2.0 * kPi * (k + 0.5) / nodes;
    Complex offset = radius * Complex(std::cos(angle), std::sin(angle));
    Complex value = weyl_function(problem, center + offset);
    Complex factor = offset;
    for (int p = 0; p < moment; ++p) factor *= offset;
    acc += value * factor;
  }
  return acc / static_cast<double>(nodes);
}

namespace {

struct Rect {
  double re_lo, re_hi, im_lo, im_hi;
  Complex center() const {
    return Complex(0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi));
  }
  double diameter() const {
    return std::hypot(re_hi - re_lo, im_hi - im_lo);
  }
  bool contains(Complex z, double margin) const {
    return z.real() >= re_lo - margin && z.real() <= re_hi + margin &&
           z.imag() >= im_lo - margin && z.imag() <= im_hi + margin;
  }
};

class RootSearch {
 public:
  explicit RootSearch(const BoundaryProblem& problem) : problem_(problem) {}

  Complex delta(Complex z) const { return characteristic(problem_, z); }

  Complex delta_derivative(Complex z) const {
    double e = 1e-6 * std::max(1.0, std::abs(z));
    return (delta(z + e) - delta(z - e)) / (2.0 * e);
  }

  std::optional<Complex> newton(Complex z, int iterations = 40) const {
    for (int it = 0; it < iterations; ++it) {
      Complex d = delta_derivative(z);
      if (d == Complex(0.0)) return std::nullopt;
      Complex step = delta(z) / d;
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        return std::nullopt;
      if (std::abs(step) < 1e-12 * std::max(1.0, std::abs(z))) return z;
    }
    return std::nullopt;
  }

  // Newton on the derivative, for double roots.
  std::optional<Complex> newton_on_derivative(Complex z,
                                              int iterations = 60) const {
    for (int it = 0; it < iterations; ++it) {
      double e = 1e-5 * std::max(1.0, std::abs(z));
      Complex d1 = (delta(z + e) - delta(z - e)) / (2.0 * e);
      Complex d2 = (delta(z + e) - 2.0 * delta(z) + delta(z - e)) / (e * e);
      if (d2 == Complex(0.0)) return std::nullopt;
      Complex step = d1 / d2;
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        return std::nullopt;
      if (std::abs(step) < 1e-9 * std::max(1.0, std::abs(z))) return z;
    }
    return std::nullopt;
  }

  // Winding number of the characteristic along the rectangle boundary. The
  // minimum edge sampling scales with the expected root count (sparser
  // sampling can alias whole phase revolutions away); from there adaptive
  // bisection keeps every accepted increment below pi/2, and every accepted
  // increment must survive a midpoint split, which exposes a hidden full
  // revolution as a 2 pi mismatch.
  int winding(const Rect& rect, int hint, int depth = 26) const {
    Complex c1(rect.re_lo, rect.im_lo), c2(rect.re_hi, rect.im_lo);
    Complex c3(rect.re_hi, rect.im_hi), c4(rect.re_lo, rect.im_hi);
    int segments = std::clamp(2 * hint + 8, 8, 192);
    double total = 0.0;
    total += edge_phase(c1, c2, segments, depth);
    total += edge_phase(c2, c3, segments, depth);
    total += edge_phase(c3, c4, segments, depth);
    total += edge_phase(c4, c1, segments, depth);
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
  }

 private:
  double edge_phase(Complex a, Complex b, int segments, int depth) const {
    double total = 0.0;
    Complex prev = a;
    Complex dprev = delta(a);
    for (int s = 1; s <= segments; ++s) {
      double t = static_cast<double>(s) / segments;
      Complex next = a + t * (b - a);
      Complex dnext = delta(next);
      total += segment_phase(prev, dprev, next, dnext, depth);
      prev = next;
      dprev = dnext;
    }
    return total;
  }

  double segment_phase(Complex a, Complex da, Complex b, Complex db,
                       int depth) const {
    double step = std::arg(db / da);
    if (depth <= 0) return step;
    double swing = std::abs(std::log(std::abs(db) / std::abs(da)));
    Complex mid = 0.5 * (a + b);
    if (std::abs(step) < 0.5 * kPi && swing < 1.2) {
      Complex dm = delta(mid);
      double s1 = std::arg(dm / da);
      double s2 = std::arg(db / dm);
      if (std::abs(s1) < 0.5 * kPi && std::abs(s2) < 0.5 * kPi &&
          std::abs(s1 + s2 - step) < 1e-6)
        return step;
      return segment_phase(a, da, mid, dm, depth - 1) +
             segment_phase(mid, dm, b, db, depth - 1);
    }
    Complex dm = delta(mid);
    return segment_phase(a, da, mid, dm, depth - 1) +
           segment_phase(mid, dm, b, db, depth - 1);
  }

  const BoundaryProblem& problem_;
};

struct Root {
  Complex lambda;
  int multiplicity;
};

// Roots inside the rectangle, with multiplicities; count must equal the
// rectangle's winding number on entry.
void subdivide(const RootSearch& search, Rect rect, int count,
               std::vector<Root>& out, int budget_level = 0) {
  if (count <= 0) return;
  if (budget_level > 90)
    fail(Err::MissedRoot, "eigenvalue subdivision did not converge");
  Complex center = rect.center();
  double scale = std::max(1.0, std::abs(center));

  if (count == 1) {
    auto root = search.newton(center);
    if (root && rect.contains(*root, 0.05 * rect.diameter() + 1e-9)) {
      out.push_back(Root{*root, 1});
      return;
    }
  } else if (rect.diameter() < 0.05 * scale) {
    auto root = search.newton_on_derivative(center);
    if (root && rect.contains(*root, 0.1 * rect.diameter())) {
      Rect check{root->real() - 1e-4 * scale, root->real() + 1e-4 * scale,
                 root->imag() - 1e-4 * scale, root->imag() + 1e-4 * scale};
      if (search.winding(check, count) == count) {
        out.push_back(Root{*root, count});
        return;
      }
    }
    if (rect.diameter() < 1e-7 * scale) {
      out.push_back(Root{center, count});
      return;
    }
  }

  // Cut the longer side; the small irrational offset keeps roots off cuts.
  bool cut_re = (rect.re_hi - rect.re_lo) >= (rect.im_hi - rect.im_lo);
  Rect left = rect, right = rect;
  if (cut_re) {
    double cut = 0.5 * (rect.re_lo + rect.re_hi) +
                 0.0137 * (rect.re_hi - rect.re_lo);
    left.re_hi = cut;
    right.re_lo = cut;
  } else {
    double cut = 0.5 * (rect.im_lo + rect.im_hi) +
                 0.0137 * (rect.im_hi - rect.im_lo);
    left.im_hi = cut;
    right.im_lo = cut;
  }
  int count_left = search.winding(left, count);
  int count_right = search.winding(right, count);
  if (count_left + count_right != count) {
    count_left = search.winding(left, 2 * count + 8, 30);
    count_right = search.winding(right, 2 * count + 8, 30);
    if (count_left + count_right != count)
      fail(Err::MissedRoot, "winding counts inconsistent during subdivision");
  }
  subdivide(search, left, count_left, out, budget_level + 1);
  subdivide(search, right, count_right, out, budget_level + 1);
}

bool rho_close(Complex a, Complex b) {
  return std::abs(principal_sqrt(a) - principal_sqrt(b)) < 1e-6;
}

}  // namespace

SpectralData find_eigenvalues(const BoundaryProblem& problem, int n_max,
                              const EigenOptions& options) {
  if (n_max < 1) fail(Err::BadValue, "n_max must be at least 1");
  RootSearch search(problem);
  int degree = problem.degree();
  std::vector<Root> roots;

  // Low region: every eigenvalue that is not yet locked to the asymptotic
  // string lives in this box.
  double low_edge = (degree + 2.0) * (degree + 2.0);
  Rect low{-low_edge - 0.731, low_edge + 0.367, -9.37, 9.37};
  subdivide(search, low, search.winding(low, degree + 6), roots);

  // Asymptotic tail: rho_n ~ n - degree - 1, polished by Newton.
  int tail_top = n_max - degree - 1 + 2;
  for (int k = 1; k <= tail_top; ++k) {
    Complex seed(static_cast<double>(k) * k, 0.0);
    auto root = search.newton(seed);
    if (!root) continue;
    bool known = false;
    for (const Root& r : roots)
      if (rho_close(r.lambda, *root)) known = true;
    if (!known) roots.push_back(Root{*root, 1});
  }

  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
    Complex ra = principal_sqrt(a.lambda), rb = principal_sqrt(b.lambda);
    if (ra.real() != rb.real()) return ra.real() < rb.real();
    return ra.imag() < rb.imag();
  });

  SpectralData data;
  for (const Root& r : roots) {
    for (int q = 0; q < r.multiplicity; ++q) {
      if (data.count() == n_max) break;
      data.rho.push_back(principal_sqrt(r.lambda));
      data.alpha.push_back(0.0);
      data.multiplicity.push_back(r.multiplicity);
    }
    if (data.count() == n_max) break;
  }
  if (data.count() < n_max)
    fail(Err::MissedRoot, "found only " + std::to_string(data.count()) +
                              " of " + std::to_string(n_max) + " eigenvalues");

  for (int n = 0; n < n_max; ++n) {
    if (data.multiplicity[static_cast<size_t>(n)] > 1) {
      if (!options.allow_multiple)
        fail(Err::MultipleEigenvalue,
             "multiple eigenvalue at index " + std::to_string(n + 1) +
                 "; enable the multiple-eigenvalue mode to accept it");
      continue;
    }
    if (std::abs(search.delta_derivative(data.lambda(n))) <= 1e-8) {
      if (!options.allow_multiple)
        fail(Err::MultipleEigenvalue,
             "eigenvalue " + std::to_string(n + 1) + " fails the simplicity check");
    }
  }

  if (options.verify_count) {
    double re_lo = -low_edge - 0.731;
    double im_hi = 9.37;
    for (int n = 0; n < n_max; ++n) {
      re_lo = std::min(re_lo, data.lambda(n).real() - 0.731);
      im_hi = std::max(im_hi, 3.0 * std::abs(data.lambda(n).imag()) + 0.917);
    }
    double rho_edge = n_max - degree - 0.5;
    if (rho_edge >= 0.5) {
      Rect global{re_lo, rho_edge * rho_edge, -im_hi, im_hi};
      int total = search.winding(global, n_max + degree + 2);
      if (total != n_max)
        fail(Err::MissedRoot, "global count check found " +
                                  std::to_string(total) + " roots, expected " +
                                  std::to_string(n_max));
    }
  }
  return data;
}

void weight_numbers(const BoundaryProblem& problem, SpectralData& data) {
  validate_spectral_data(data);
  int count = data.count();
  data.alpha.assign(static_cast<size_t>(count), Complex(0.0));
  const auto& r1 = problem.boundary.r1;
  const auto& r2 = problem.boundary.r2;
  auto dr1 = poly_derivative(r1);
  auto dr2 = poly_derivative(r2);
  const Grid& grid = problem.sigma.grid();
  double h = grid.spacing();

  int n = 0;
  while (n < count) {
    int q = data.multiplicity.empty() ? 1 : data.multiplicity[static_cast<size_t>(n)];
    q = std::min(q, count - n);
    Complex lambda = data.lambda(n);
    if (q == 1) {
      SolutionTable phi = phi_table(problem, lambda);
      Complex integral = 0.0;
      for (int j = 1; j <= grid.intervals(); ++j) {
        Complex a = phi.y[static_cast<size_t>(j - 1)] * phi.y[static_cast<size_t>(j - 1)];
        Complex b = phi.y[static_cast<size_t>(j)] * phi.y[static_cast<size_t>(j)];
        integral += 0.5 * h * (a + b);
      }
      Complex r1v = poly_eval(r1, lambda);
      double scale = std::max(1.0, std::pow(std::abs(lambda), problem.degree()));
      if (std::abs(r1v) < 1e-12 * scale)
        fail(Err::VanishingR1, "r1 vanishes at eigenvalue " +
                                   std::to_string(n + 1));
      Complex end_y = phi.y.back();
      Complex end_yq = phi.yq.back();
      Complex correction = (end_y / r1v) * (poly_eval(dr1, lambda) * end_yq +
                                            poly_eval(dr2, lambda) * end_y);
      Complex inverse_alpha = integral - correction;
      if (std::abs(inverse_alpha) < 1e-14)
        fail(Err::BadValue, "weight denominator vanished at eigenvalue " +
                                std::to_string(n + 1));
      data.alpha[static_cast<size_t>(n)] = 1.0 / inverse_alpha;
      n += 1;
    } else {
      double gap = 1.0;
      for (int k = 0; k < count; ++k) {
        if (k >= n && k < n + q) continue;
        gap = std::min(gap, std::abs(data.lambda(k) - lambda));
      }
      double radius = 0.5 * gap;
      for (int j = 0; j < q; ++j)
        data.alpha[static_cast<size_t>(n + j)] =
            contour_moment(problem, lambda, radius, j);
      n += q;
    }
  }
}

SpectralData spectral_data(const BoundaryProblem& problem, int n_max,
                           const EigenOptions& options) {
  SpectralData data = find_eigenvalues(problem, n_max, options);
  weight_numbers(problem, data);
  return data;
}

}  // namespace slpoly
