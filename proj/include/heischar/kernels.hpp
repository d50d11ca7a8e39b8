#pragma once

// Data-parallel inner loops of meshing and sample evaluation. Each kernel
// has an OpenMP version and a serial reference; both produce identical
// output in canonical order regardless of thread count.

#include <array>
#include <span>
#include <vector>

#include "heischar/fields.hpp"
#include "heischar/scalar_field.hpp"

namespace heischar::kernels {

/// Reads HEISCHAR_THREADS and caps the OpenMP team size; returns the cap in effect.
int configure_threads();

/// Regular lattice with `cells` cells per axis over a box.
struct Lattice {
  Box<3> box;
  int cells = 0;

  int nodes() const { return cells + 1; }
  Vec3 spacing() const { return box.extent() / static_cast<double>(cells); }
  Vec3 node(int i, int j, int k) const {
    const Vec3 h = spacing();
    return box.lo + Vec3(i * h[0], j * h[1], k * h[2]);
  }
  std::size_t node_index(int i, int j, int k) const {
    const std::size_t n = static_cast<std::size_t>(nodes());
    return (static_cast<std::size_t>(i) * n + j) * n + k;
  }
  std::size_t cell_index(const std::array<int, 3>& c) const {
    const std::size_t n = static_cast<std::size_t>(cells);
    return (static_cast<std::size_t>(c[0]) * n + c[1]) * n + c[2];
  }
};

std::vector<double> lattice_values(const AmbientField& f, const Lattice& lattice);
std::vector<double> lattice_values_serial(const AmbientField& f, const Lattice& lattice);

/// Cells whose eight corner values do not share one strict sign, in cell-index order.
std::vector<std::array<int, 3>> crossing_cells(std::span<const double> values, const Lattice& lattice);
std::vector<std::array<int, 3>> crossing_cells_serial(std::span<const double> values,
                                                      const Lattice& lattice);

struct Projection {
  Vec3 point;
  int iterations = 0;
  bool converged = false;
};

/// Newton steps xi <- xi - psi grad psi / |grad psi|^2 until |psi| <= tol,
/// followed by up to three polishing steps while |psi| keeps decreasing.
Projection project_point(const AmbientField& f, const Vec3& seed, double tol, int max_iterations = 50);
std::vector<Projection> project_to_zero_set(const AmbientField& f, std::span<const Vec3> seeds,
                                            double tol, int max_iterations = 50);
std::vector<Projection> project_to_zero_set_serial(const AmbientField& f, std::span<const Vec3> seeds,
                                                   double tol, int max_iterations = 50);

std::vector<GradientData<3>> evaluate_samples(const AmbientField& f, std::span<const Vec3> points);
std::vector<GradientData<3>> evaluate_samples_serial(const AmbientField& f,
                                                     std::span<const Vec3> points);

/// Characteristic measure |grad_H psi| / (|grad psi| (1 + 2|z|)) per sample.
double measure_from_gradient(const GradientData<3>& g, const Vec3& xi);
std::vector<double> measures(std::span<const GradientData<3>> grads, std::span<const Vec3> points);
std::vector<double> measures_serial(std::span<const GradientData<3>> grads,
                                    std::span<const Vec3> points);

}  // namespace heischar::kernels
