#include "heischar/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <string>

namespace heischar::kernels {

int configure_threads() {
  int cap = omp_get_max_threads();
  if (const char* env = std::getenv("HEISCHAR_THREADS")) {
    try {
      const int requested = std::stoi(env);
      if (requested >= 1 && requested < cap) cap = requested;
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  omp_set_num_threads(cap);
  return cap;
}

std::vector<double> lattice_values(const AmbientField& f, const Lattice& lattice) {
  const int n = lattice.nodes();
  std::vector<double> values(static_cast<std::size_t>(n) * n * n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) values[lattice.node_index(i, j, k)] = f.value(lattice.node(i, j, k));
    }
  }
  return values;
}

std::vector<double> lattice_values_serial(const AmbientField& f, const Lattice& lattice) {
  const int n = lattice.nodes();
  std::vector<double> values(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) values[lattice.node_index(i, j, k)] = f.value(lattice.node(i, j, k));
    }
  }
  return values;
}

namespace {

bool cell_crosses(std::span<const double> v, const Lattice& l, int i, int j, int k) {
  bool any_neg = false, any_nonneg = false;
  for (int di = 0; di < 2; ++di) {
    for (int dj = 0; dj < 2; ++dj) {
      for (int dk = 0; dk < 2; ++dk) {
        const double x = v[l.node_index(i + di, j + dj, k + dk)];
        if (x < 0.0) {
          any_neg = true;
        } else {
          any_nonneg = true;
        }
      }
    }
  }
  return any_neg && any_nonneg;
}

}  // namespace

std::vector<std::array<int, 3>> crossing_cells(std::span<const double> values, const Lattice& lattice) {
  const int n = lattice.cells;
  std::vector<std::vector<std::array<int, 3>>> slabs(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        if (cell_crosses(values, lattice, i, j, k)) slabs[i].push_back({i, j, k});
      }
    }
  }
  std::vector<std::array<int, 3>> out;
  for (auto& s : slabs) out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::vector<std::array<int, 3>> crossing_cells_serial(std::span<const double> values,
                                                      const Lattice& lattice) {
  const int n = lattice.cells;
  std::vector<std::array<int, 3>> out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        if (cell_crosses(values, lattice, i, j, k)) out.push_back({i, j, k});
      }
    }
  }
  return out;
}

Projection project_point(const AmbientField& f, const Vec3& seed, double tol, int max_iterations) {
  Projection p{seed, 0, false};
  double v = f.value(p.point);
  int polish = 0;
  for (int it = 0; it < max_iterations && std::isfinite(v); ++it) {
    if (std::abs(v) <= tol) {
      p.converged = true;
      if (polish == 3 || v == 0.0) break;
    }
    const Vec3 g = f.gradient(p.point);
    const double g2 = g.squaredNorm();
    if (!(g2 > 0.0) || !std::isfinite(g2)) break;
    const Vec3 next = p.point - (v / g2) * g;
    const double vn = f.value(next);
    if (p.converged) {
      if (!(std::abs(vn) < std::abs(v))) break;
      ++polish;
    }
    p.point = next;
    v = vn;
    p.iterations = it + 1;
  }
  if (std::abs(v) <= tol) p.converged = true;
  return p;
}

std::vector<Projection> project_to_zero_set(const AmbientField& f, std::span<const Vec3> seeds,
                                            double tol, int max_iterations) {
  std::vector<Projection> out(seeds.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(seeds.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = project_point(f, seeds[i], tol, max_iterations);
  return out;
}

std::vector<Projection> project_to_zero_set_serial(const AmbientField& f, std::span<const Vec3> seeds,
                                                   double tol, int max_iterations) {
  std::vector<Projection> out;
  out.reserve(seeds.size());
  for (const Vec3& s : seeds) out.push_back(project_point(f, s, tol, max_iterations));
  return out;
}

std::vector<GradientData<3>> evaluate_samples(const AmbientField& f, std::span<const Vec3> points) {
  std::vector<GradientData<3>> out(points.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    GradientData<3>& g = out[i];
    g.value = f.value(points[i]);
    g.euclidean = f.gradient(points[i]);
    g.horizontal = h1::horizontal(g.euclidean, points[i]);
  }
  return out;
}

std::vector<GradientData<3>> evaluate_samples_serial(const AmbientField& f,
                                                     std::span<const Vec3> points) {
  std::vector<GradientData<3>> out;
  out.reserve(points.size());
  for (const Vec3& p : points) {
    GradientData<3> g;
    g.value = f.value(p);
    g.euclidean = f.gradient(p);
    g.horizontal = h1::horizontal(g.euclidean, p);
    out.push_back(g);
  }
  return out;
}

double measure_from_gradient(const GradientData<3>& g, const Vec3& xi) {
  const Vec2 hor = g.horizontal ? *g.horizontal : h1::horizontal(g.euclidean, xi);
  const double r = std::hypot(xi[0], xi[1]);
  return hor.norm() / (g.euclidean.norm() * (1.0 + 2.0 * r));
}

std::vector<double> measures(std::span<const GradientData<3>> grads, std::span<const Vec3> points) {
  std::vector<double> out(grads.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(grads.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = measure_from_gradient(grads[i], points[i]);
  return out;
}

std::vector<double> measures_serial(std::span<const GradientData<3>> grads,
                                    std::span<const Vec3> points) {
  std::vector<double> out;
  out.reserve(grads.size());
  for (std::size_t i = 0; i < grads.size(); ++i) out.push_back(measure_from_gradient(grads[i], points[i]));
  return out;
}

}  // namespace heischar::kernels
