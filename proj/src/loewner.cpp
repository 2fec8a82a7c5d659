#include "he/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "he/rng.hpp"
#include "he/simd/kernels.hpp"

namespace he {

namespace {

constexpr double kSwallowed = 1e-9;
constexpr double kLift = 1e-12;

Complex slit_map(Complex z, double w, double c) {
  double re = z.real();
  double im = z.imag();
  simd::detail::slit_map_point(re, im, w, c);
  return {re, im};
}

}  // namespace

Complex slit_forward(Complex z, const SlitStep& s) {
  if (z.imag() < 0.0) throw Error("slit map: point below the real axis");
  return slit_map(z, s.w, 4.0 * s.dt);
}

Complex slit_inverse(Complex z, const SlitStep& s) {
  if (z.imag() < 0.0) throw Error("slit map: point below the real axis");
  return slit_map(z, s.w, -4.0 * s.dt);
}

void HCurve::validate() const {
  if (points.empty() || points[0] != Complex(0.0, 0.0)) throw Error("curve must start at 0");
  for (std::size_t k = 1; k < points.size(); ++k) {
    if (!(points[k].imag() > 0.0)) throw Error("curve point " + std::to_string(k) + " is not above the real axis");
    if (points[k] == points[k - 1]) throw Error("curve point " + std::to_string(k) + " repeats its predecessor");
  }
}

DrivingFunction::DrivingFunction(std::vector<double> t, std::vector<double> w) : t_(std::move(t)), w_(std::move(w)) {
  if (t_.empty() || t_.size() != w_.size()) throw Error("driving function: t and w must have equal nonzero length");
  if (t_[0] != 0.0) throw Error("driving function must start at t = 0");
  for (std::size_t k = 0; k < t_.size(); ++k) {
    if (!std::isfinite(w_[k])) throw Error("driving function: non-finite value");
    if (k > 0 && !(t_[k] > t_[k - 1])) throw Error("driving function: times must increase strictly");
  }
}

double DrivingFunction::value_at(double t) const {
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  if (it == t_.begin()) return w_.front();
  return w_[static_cast<std::size_t>(it - t_.begin()) - 1];
}

DrivingExtractor::DrivingExtractor(ExtractionConfig cfg) : cfg_(cfg) {
  if (!(cfg_.dt_max > 0.0)) throw Error("extraction: dt_max must be positive");
}

Complex DrivingExtractor::map(Complex z) const {
  double re = z.real();
  double im = z.imag();
  for (const auto& s : slits_) simd::detail::slit_map_point(re, im, s.w, 4.0 * s.dt);
  return {re, im};
}

void DrivingExtractor::emit(double w, double dt) {
  slits_.push_back({w, dt});
  t_ += dt;
}

void DrivingExtractor::push(Complex z) {
  const std::size_t k = point_capacity_.size() + 1;
  if (!(z.imag() > 0.0)) throw Error("extraction: curve point " + std::to_string(k) + " is not above the real axis");
  if (z == last_) throw Error("extraction: curve point " + std::to_string(k) + " repeats its predecessor");
  try {
    add_segment(last_, z, 0);
  } catch (const Error& e) {
    throw Error("extraction failed at curve point " + std::to_string(k) + ": " + e.what());
  }
  last_ = z;
  point_capacity_.push_back(t_);
}

void DrivingExtractor::add_segment(Complex from, Complex to, int depth) {
  if (depth > 60) throw Error("segment subdivision does not converge");
  const Complex img = map(to);
  if (!(img.imag() > cfg_.min_height)) throw Error("image collapsed onto the real axis");
  const double dt = 0.25 * img.imag() * img.imag();
  if (dt <= cfg_.dt_max) {
    emit(img.real(), dt);
    return;
  }
  const auto m = static_cast<std::size_t>(std::ceil(2.0 * std::sqrt(dt / cfg_.dt_max)));
  std::vector<double> re(m), im(m);
  for (std::size_t j = 0; j < m; ++j) {
    const Complex p = from + (to - from) * (static_cast<double>(j + 1) / static_cast<double>(m));
    re[j] = p.real();
    im[j] = p.imag();
  }
  for (const auto& s : slits_) simd::slit_map(re.data(), im.data(), m, s.w, 4.0 * s.dt);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t before = slits_.size();
    if (!(im[j] > cfg_.min_height)) throw Error("image collapsed onto the real axis");
    const double dtj = 0.25 * im[j] * im[j];
    if (dtj <= cfg_.dt_max) {
      emit(re[j], dtj);
    } else {
      const Complex a = from + (to - from) * (static_cast<double>(j) / static_cast<double>(m));
      const Complex b = from + (to - from) * (static_cast<double>(j + 1) / static_cast<double>(m));
      add_segment(a, 0.5 * (a + b), depth + 1);
      add_segment(0.5 * (a + b), b, depth + 1);
    }
    const std::size_t rest = m - j - 1;
    for (std::size_t s = before; s < slits_.size() && rest > 0; ++s) {
      simd::slit_map(re.data() + j + 1, im.data() + j + 1, rest, slits_[s].w, 4.0 * slits_[s].dt);
    }
  }
}

DrivingFunction DrivingExtractor::driving() const {
  std::vector<double> t(slits_.size() + 1, 0.0);
  std::vector<double> w(slits_.size() + 1, 0.0);
  for (std::size_t k = 0; k < slits_.size(); ++k) {
    t[k + 1] = t[k] + slits_[k].dt;
    w[k] = slits_[k].w;
  }
  if (!slits_.empty()) w.back() = slits_.back().w;
  return DrivingFunction(std::move(t), std::move(w));
}

DrivingFunction extract_driving(const HCurve& c, const ExtractionConfig& cfg) {
  c.validate();
  DrivingExtractor ex(cfg);
  for (std::size_t k = 1; k < c.points.size(); ++k) ex.push(c.points[k]);
  return ex.driving();
}

DrivingFunction brownian_driving(double kappa, double dt, double T, std::uint64_t seed, std::uint64_t index) {
  if (!(kappa >= 0.0) || !(dt > 0.0) || !(T >= dt)) throw Error("Brownian driving: need kappa >= 0 and 0 < dt <= T");
  const auto n = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  RandomStream rng(seed, Purpose::BrownianDriving, index);
  std::vector<double> t(n + 1, 0.0);
  std::vector<double> w(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    t[k + 1] = k + 1 == n ? T : static_cast<double>(k + 1) * dt;
    const double g = rng.normal_pair(k / 2)[k % 2];
    w[k + 1] = w[k] + std::sqrt(kappa * (t[k + 1] - t[k])) * g;
  }
  return DrivingFunction(std::move(t), std::move(w));
}

Trace trace_of(const DrivingFunction& d, std::size_t stride) {
  if (stride == 0) throw Error("trace: stride must be positive");
  const std::size_t n = d.slit_count();
  std::vector<double> re, im;
  std::vector<double> times;
  for (std::size_t m = n; m-- > 0;) {
    if ((m + 1) % stride == 0 || m + 1 == n) {
      re.push_back(d.w()[m]);
      im.push_back(0.0);
      times.push_back(d.t()[m + 1]);
    }
    const auto s = d.slit(m);
    simd::slit_map(re.data(), im.data(), re.size(), s.w, -4.0 * s.dt);
  }
  Trace tr;
  tr.t.push_back(0.0);
  tr.curve.points.push_back({0.0, 0.0});
  for (std::size_t i = re.size(); i-- > 0;) {
    tr.t.push_back(times[i]);
    tr.curve.points.push_back({re[i], im[i]});
  }
  return tr;
}

SlePath sle_path(double kappa, double dt, double T, std::uint64_t seed, std::uint64_t index, std::size_t stride) {
  if (!(kappa > 0.0)) throw Error("sle_path: kappa must be positive");
  SlePath out;
  out.driving = brownian_driving(kappa, dt, T, seed, index);
  out.trace = trace_of(out.driving, stride);
  return out;
}

namespace {

struct MapCursor {
  const DrivingFunction& d;
  double re, im;
  bool guard;
  std::size_t k = 0;

  MapCursor(const DrivingFunction& df, Complex z) : d(df) {
    if (z.imag() < 0.0) throw Error("map: point below the real axis");
    guard = z.imag() >= kSwallowed;
    re = z.real();
    im = z.imag() > 0.0 ? z.imag() : kLift;
  }

  void apply(double w, double dt) {
    simd::detail::slit_map_point(re, im, w, 4.0 * dt);
    if (guard && im < kSwallowed) throw Error("map: point swallowed");
  }

  // Advances to capacity t (monotone across calls).
  void advance(double t, double& done) {
    if (t < done) throw Error("map: times must increase");
    if (t > d.total_capacity() * (1.0 + 1e-12)) throw Error("map: time beyond the driving function");
    while (k < d.slit_count() && d.t()[k + 1] <= t) {
      if (done < d.t()[k + 1]) apply(d.w()[k], d.t()[k + 1] - done);
      done = d.t()[k + 1];
      ++k;
    }
    if (t > done && k < d.slit_count()) {
      apply(d.w()[k], t - done);
      done = t;
    }
  }
};

}  // namespace

Complex evaluate_map(const DrivingFunction& d, double t, Complex z) {
  if (t < 0.0) throw Error("map: negative time");
  MapCursor c(d, z);
  double done = 0.0;
  c.advance(t, done);
  return {c.re, c.im};
}

double angle_observable(const DrivingFunction& d, double t, Complex z) {
  const double times[] = {t};
  return angle_observable(d, times, z).front();
}

std::vector<double> angle_observable(const DrivingFunction& d, std::span<const double> times, Complex z) {
  MapCursor c(d, z);
  double done = 0.0;
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t < 0.0) throw Error("map: negative time");
    c.advance(t, done);
    out.push_back(1.0 - std::atan2(c.im, c.re - d.value_at(t)) / std::numbers::pi);
  }
  return out;
}

Complex loewner_ode(const DrivingFunction& d, double t, Complex z, double tol) {
  Complex g = z.imag() > 0.0 ? z : Complex(z.real(), kLift);
  auto rk4 = [](Complex y, double w, double h) {
    auto f = [w](Complex v) { return 2.0 / (v - w); };
    const Complex k1 = f(y);
    const Complex k2 = f(y + 0.5 * h * k1);
    const Complex k3 = f(y + 0.5 * h * k2);
    const Complex k4 = f(y + h * k3);
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  for (std::size_t k = 0; k < d.slit_count() && d.t()[k] < t; ++k) {
    const double w = d.w()[k];
    const double end = std::min(t, d.t()[k + 1]);
    double s = d.t()[k];
    double h = end - s;
    while (s < end) {
      h = std::min(h, end - s);
      const Complex full = rk4(g, w, h);
      const Complex half = rk4(rk4(g, w, 0.5 * h), w, 0.5 * h);
      const double err = std::abs(full - half);
      if (err > tol * std::max(1.0, std::abs(half)) && h > 1e-16) {
        h *= 0.5;
        continue;
      }
      g = half + (half - full) / 15.0;
      s += h;
      if (err < 0.01 * tol) h *= 2.0;
    }
  }
  return g;
}

double dstar(Complex z, Complex w) {
  auto psi = [](Complex x) {
    if (std::isinf(x.real()) || std::isinf(x.imag())) return Complex(1.0, 0.0);
    const Complex i(0.0, 1.0);
    return (x - i) / (x + i);
  };
  return std::abs(psi(z) - psi(w));
}

double hausdorff(std::span<const Complex> a, std::span<const Complex> b, Metric metric) {
  if (a.empty() || b.empty()) throw Error("hausdorff: empty point set");
  auto dist = [metric](Complex x, Complex y) { return metric == Metric::Euclidean ? std::abs(x - y) : dstar(x, y); };
  auto one_sided = [&](std::span<const Complex> p, std::span<const Complex> q) {
    double worst = 0.0;
    for (const auto& x : p) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : q) best = std::min(best, dist(x, y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

void write_driving_csv(std::ostream& os, const DrivingFunction& d) {
  os << "t,w\n";
  os.precision(17);
  for (std::size_t k = 0; k < d.t().size(); ++k) os << d.t()[k] << ',' << d.w()[k] << '\n';
}

void write_trace_csv(std::ostream& os, const Trace& tr) {
  os << "t,x,y\n";
  os.precision(17);
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    os << tr.t[k] << ',' << tr.curve.points[k].real() << ',' << tr.curve.points[k].imag() << '\n';
  }
}

std::vector<Complex> read_path_csv(std::istream& is) {
  std::string line;
  std::vector<Complex> out;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() < 2) throw Error("path file line " + std::to_string(lineno) + ": expected x,y columns");
    try {
      const double x = std::stod(cells[cells.size() - 2]);
      const double y = std::stod(cells[cells.size() - 1]);
      out.emplace_back(x, y);
    } catch (const std::logic_error&) {
      if (lineno == 1) continue;  // header
      throw Error("path file line " + std::to_string(lineno) + ": not a number");
    }
  }
  return out;
}

}  // namespace he
