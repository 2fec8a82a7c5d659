#pragma once
// Chordal Loewner chains in the upper half-plane built from vertical slits.
//
// A driving function is kept as a step function: on [t_k, t_{k+1}) it equals
// w_k, and the map over that interval is the exact constant-driving solution
//   g(z) = w_k + sqrt((z - w_k)^2 + 4 (t_{k+1} - t_k)).

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "he/lattice.hpp"

namespace he {

struct SlitStep {
  double w = 0.0;
  double dt = 0.0;
};

Complex slit_forward(Complex z, const SlitStep& s);
Complex slit_inverse(Complex z, const SlitStep& s);

// A sampled curve from 0 into the upper half-plane.
struct HCurve {
  std::vector<Complex> points;
  // Throws unless points[0] = 0, later points lie strictly above the real
  // axis and consecutive points differ.
  void validate() const;
};

class DrivingFunction {
 public:
  DrivingFunction() : t_{0.0}, w_{0.0} {}
  DrivingFunction(std::vector<double> t, std::vector<double> w);

  const std::vector<double>& t() const { return t_; }
  const std::vector<double>& w() const { return w_; }
  std::size_t slit_count() const { return t_.size() - 1; }
  SlitStep slit(std::size_t k) const { return {w_[k], t_[k + 1] - t_[k]}; }
  double total_capacity() const { return t_.back(); }
  // w_k for t in [t_k, t_{k+1}); the last value beyond the final time.
  double value_at(double t) const;

 private:
  std::vector<double> t_;
  std::vector<double> w_;
};

struct ExtractionConfig {
  // Largest capacity increment of a single slit; longer curve segments are
  // subdivided.
  double dt_max = 1e-3;
  // Image heights at or below this abort the extraction.
  double min_height = 1e-10;
};

// Incremental zipper: each pushed point is mapped through the slits found so
// far and its image x + iy becomes the slit (x, y^2/4). O(n) per point.
class DrivingExtractor {
 public:
  explicit DrivingExtractor(ExtractionConfig cfg = {});

  // Next curve point (the curve starts at 0, which is not pushed).
  void push(Complex z);
  double capacity() const { return t_; }
  std::size_t points_pushed() const { return point_capacity_.size(); }
  // Capacity reached after each pushed point.
  const std::vector<double>& point_capacity() const { return point_capacity_; }
  const std::vector<SlitStep>& slits() const { return slits_; }
  // Image of z under the composition of all slits so far.
  Complex map(Complex z) const;
  DrivingFunction driving() const;

 private:
  void add_segment(Complex from, Complex to, int depth);
  void emit(double w, double dt);

  ExtractionConfig cfg_;
  std::vector<SlitStep> slits_;
  std::vector<double> point_capacity_;
  Complex last_{0.0, 0.0};
  double t_ = 0.0;
};

DrivingFunction extract_driving(const HCurve& c, const ExtractionConfig& cfg = {});

// W(t_k) = sqrt(kappa) B(t_k) on the grid t_k = k dt (the last step may be
// shorter), reproducible from (seed, index).
DrivingFunction brownian_driving(double kappa, double dt, double T, std::uint64_t seed, std::uint64_t index = 0);

// Curve points at the grid times t_k with k a multiple of `stride` (and at
// the final time), with 0 at t = 0. O(n^2 / stride).
struct Trace {
  std::vector<double> t;
  HCurve curve;
};
Trace trace_of(const DrivingFunction& d, std::size_t stride = 1);

struct SlePath {
  DrivingFunction driving;
  Trace trace;
};
SlePath sle_path(double kappa, double dt, double T, std::uint64_t seed, std::uint64_t index = 0,
                 std::size_t stride = 1);

// g_t(z). Points on the real axis are lifted by 1e-12 i; a point whose
// imaginary part falls below 1e-9 counts as swallowed.
Complex evaluate_map(const DrivingFunction& d, double t, Complex z);

// 1 - arg(g_t(z) - W(t)) / pi.
double angle_observable(const DrivingFunction& d, double t, Complex z);
// The same at several increasing times, in one pass.
std::vector<double> angle_observable(const DrivingFunction& d, std::span<const double> times, Complex z);

// Adaptive RK4 integration of dg/dt = 2 / (g - W(t)); an independent check of
// evaluate_map.
Complex loewner_ode(const DrivingFunction& d, double t, Complex z, double tol = 1e-12);

// |Psi(z) - Psi(w)| with Psi(z) = (z - i)/(z + i); infinite points map to 1.
double dstar(Complex z, Complex w);

enum class Metric { Euclidean, DStar };

double hausdorff(std::span<const Complex> a, std::span<const Complex> b, Metric metric = Metric::Euclidean);

void write_driving_csv(std::ostream& os, const DrivingFunction& d);
void write_trace_csv(std::ostream& os, const Trace& tr);
// Reads `step,x,y` (or any three-column x,y-last) path files.
std::vector<Complex> read_path_csv(std::istream& is);

}  // namespace he
