#include "kp5/dispersion.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "kp5/cutoffs.hpp"
#include "kp5/error.hpp"
#include "kp5/fft.hpp"

namespace kp5 {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kConvergenceTol = 1e-8;
// Absolute bandwidth margin for the spectral tails of the cutoffs.
constexpr double kCutoffBand = 3000.0;
constexpr long kReanchor = 4096;
constexpr int kCandidates = 4;

long smooth_size(long n) {
  for (long m = std::max(n, 1L);; ++m) {
    long r = m;
    for (long f : {2L, 3L, 5L})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

// Trapezoid nodes a + k delta, k < m, spanning [a, b]; the integrands vanish at both ends.
struct Nodes {
  double a = 0.0;
  double delta = 0.0;
  long m = 0;
};

Nodes make_nodes(double a, double b, double omega) {
  const double target = 2.0 * kPi / (omega + kCutoffBand);
  const long m = static_cast<long>(std::ceil((b - a) / target)) + 1;
  return {a, (b - a) / static_cast<double>(m - 1), m};
}

// delta * sum_k g_k exp(i X eta_k).
cd stored_sum(const std::vector<cd>& g, const Nodes& q, double X) {
  cd acc = 0.0;
  const cd step = std::polar(1.0, X * q.delta);
  cd z;
  for (long k = 0; k < q.m; ++k) {
    if (k % kReanchor == 0) z = std::polar(1.0, X * (q.a + static_cast<double>(k) * q.delta));
    acc += g[static_cast<size_t>(k)] * z;
    z *= step;
  }
  return acc * q.delta;
}

cd streamed_sum(const std::function<cd(double)>& g, const Nodes& q, double X) {
  cd acc = 0.0;
  for (long k = 0; k < q.m; ++k) {
    const double eta = q.a + static_cast<double>(k) * q.delta;
    acc += g(eta) * std::polar(1.0, X * eta);
  }
  return acc * q.delta;
}

double real_part_abs(cd w, cd s) { return std::abs(2.0 * (w * s).real()); }

template <class F>
double golden_max(const F& f, double lo, double hi, double& arg) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  const double tol = 1e-5 * std::max(hi - lo, 1e-300);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  arg = fc >= fd ? c : d;
  return std::max(fc, fd);
}

// sup over X in [X_lo, X_hi] of |2 Re(w delta sum_k g_k exp(i X eta_k))|: an FFT map
// picks the best local maxima, golden-section search on direct sums refines them.
OscillatorySup sup_from_samples(const std::vector<cd>& gv, const Nodes& q, double pad_length, cd w, double X_lo,
                                double X_hi) {
  const long P = smooth_size(std::max(q.m, static_cast<long>(std::ceil(pad_length / q.delta))));
  if (P > std::numeric_limits<int>::max()) fail(ErrorCode::QuadratureUnresolved, "oscillatory map too large");
  const double dX = 2.0 * kPi / (static_cast<double>(P) * q.delta);

  std::vector<std::pair<double, double>> peaks;  // (value, X)
  {
    Eigen::VectorXcd in = Eigen::VectorXcd::Zero(P);
    for (long k = 0; k < q.m; ++k) in[k] = gv[static_cast<size_t>(k)];
    const Eigen::VectorXcd F = fft::dft(in, +1);
    in.resize(0);
    const long lo = static_cast<long>(std::ceil(X_lo / dX));
    const long hi = static_cast<long>(std::floor(X_hi / dX));
    auto value = [&](long i) {
      const double X = static_cast<double>(i) * dX;
      const long idx = ((i % P) + P) % P;
      return real_part_abs(w, F[idx] * std::polar(1.0, X * q.a) * q.delta);
    };
    if (hi - lo + 1 >= 1 && hi - lo + 1 < P) {
      std::vector<double> v(static_cast<size_t>(hi - lo + 3));
      for (long i = lo - 1; i <= hi + 1; ++i) v[static_cast<size_t>(i - lo + 1)] = value(i);
      for (long i = lo; i <= hi; ++i) {
        const size_t s = static_cast<size_t>(i - lo + 1);
        const bool edge = i == lo || i == hi;
        if (edge || (v[s] >= v[s - 1] && v[s] >= v[s + 1])) peaks.emplace_back(v[s], static_cast<double>(i) * dX);
      }
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](auto& p1, auto& p2) { return p1.first > p2.first; });
  if (peaks.size() > static_cast<size_t>(kCandidates)) peaks.resize(kCandidates);

  auto direct = [&](double X) { return real_part_abs(w, stored_sum(gv, q, X)); };
  std::vector<std::pair<double, double>> brackets;
  for (auto& [v, X] : peaks) brackets.emplace_back(std::max(X - dX, X_lo), std::min(X + dX, X_hi));
  if (brackets.empty()) brackets.emplace_back(X_lo, X_hi);

  OscillatorySup best;
  best.value = -1.0;
  best.nodes = q.m;
  for (auto& [lo, hi] : brackets) {
    double arg = lo;
    const double v = hi > lo ? golden_max(direct, lo, hi, arg) : direct(lo);
    if (v > best.value) {
      best.value = v;
      best.x = arg;
    }
  }
  return best;
}

// Recomputes the value at best.x with twice the node density.
void check_refinement(const std::function<cd(double)>& g, const Nodes& q, cd w, OscillatorySup& best) {
  Nodes fine = q;
  fine.delta = q.delta / 2.0;
  fine.m = 2 * q.m - 1;
  const double check = real_part_abs(w, streamed_sum(g, fine, best.x));
  const double scale = std::max(std::abs(check), std::abs(best.value));
  best.refinement_change = scale > 0.0 ? std::abs(check - best.value) / scale : 0.0;
  if (best.refinement_change > kConvergenceTol)
    fail(ErrorCode::QuadratureUnresolved,
         "sup changed by " + std::to_string(best.refinement_change) + " under node doubling");
}

// omega bounds |d/d eta (phase of g) + X| on the search range.
OscillatorySup sup_search(const std::function<cd(double)>& g, double a, double b, double omega, double pad_length,
                          cd w, double X_lo, double X_hi) {
  const Nodes q = make_nodes(a, b, omega);
  OscillatorySup best;
  {
    std::vector<cd> gv(static_cast<size_t>(q.m));
    for (long k = 0; k < q.m; ++k) gv[static_cast<size_t>(k)] = g(q.a + static_cast<double>(k) * q.delta);
    best = sup_from_samples(gv, q, pad_length, w, X_lo, X_hi);
  }
  check_refinement(g, q, w, best);
  return best;
}

void require_positive_n(double N, double t) {
  if (!(N > 0.0) || !std::isfinite(N)) fail(ErrorCode::InvalidArgument, "N must be positive");
  if (t == 0.0 || !std::isfinite(t)) fail(ErrorCode::InvalidArgument, "t must be nonzero");
}

// Scaled phase1d: sup over X in [X_lo, X_hi] of |int exp(i(tau eta^5 + X eta)) psi1(eta) d eta|, tau > 0.
OscillatorySup scaled_phase1d(double tau, double X_lo, double X_hi, double weight_power, cd w) {
  const double Xmax = std::max(std::abs(X_lo), std::abs(X_hi));
  const double omega = 5.0 * tau * 256.0 + Xmax;
  auto g = [tau, weight_power](double eta) -> cd {
    const double c = psi1(eta);
    if (c == 0.0) return 0.0;
    const double amp = weight_power == 0.0 ? c : c * std::pow(eta, weight_power);
    const double e2 = eta * eta;
    return std::polar(amp, tau * e2 * e2 * eta);
  };
  return sup_search(g, 0.25, 4.0, omega, 8.0, w, X_lo, X_hi);
}

double stationary_range(double tau) { return 5.0 * tau * 256.0 + 8.0 * kPi; }

}  // namespace

OscillatorySup phase1d_sup(double N, double t, double x_lo, double x_hi) {
  require_positive_n(N, t);
  if (!(x_lo <= x_hi)) fail(ErrorCode::InvalidArgument, "empty x search interval");
  const double tau = std::abs(t) * std::pow(N, 5);
  // For t < 0 the integral at x equals the t > 0 integral at -x.
  const double X_lo = t > 0 ? x_lo * N : -x_hi * N;
  const double X_hi = t > 0 ? x_hi * N : -x_lo * N;
  OscillatorySup r = scaled_phase1d(tau, X_lo, X_hi, 0.0, 1.0);
  r.value *= N;
  r.x = (t > 0 ? r.x : -r.x) / N;
  return r;
}

OscillatorySup phase1d_sup(double N, double t) {
  require_positive_n(N, t);
  const double h = stationary_range(std::abs(t) * std::pow(N, 5)) / N;
  return phase1d_sup(N, t, -h, h);
}

OscillatorySup kernel2d_sup(double N, double t) {
  require_positive_n(N, t);
  const double tau = std::abs(t) * std::pow(N, 5);
  const double h = stationary_range(tau);
  OscillatorySup r = scaled_phase1d(tau, -h, h, 0.5, std::polar(1.0, kPi / 4.0));
  r.value *= std::pow(N, 1.5) * std::sqrt(kPi / std::abs(t));
  r.x /= N;
  if (t < 0) r.x = -r.x;
  return r;
}

double kernel2d_abs(double N, double t, double x, double y) {
  require_positive_n(N, t);
  if (t < 0) {
    t = -t;
    x = -x;
    y = -y;
  }
  const double tau = t * std::pow(N, 5);
  const double X = (x - y * y / (4.0 * t)) * N;
  auto g = [tau](double eta) -> cd {
    const double c = psi1(eta);
    if (c == 0.0) return 0.0;
    const double e2 = eta * eta;
    return std::polar(c * std::sqrt(eta), tau * e2 * e2 * eta);
  };
  const Nodes q = make_nodes(0.25, 4.0, 5.0 * tau * 256.0 + std::abs(X));
  const cd s = streamed_sum(g, q, X);
  return real_part_abs(std::polar(1.0, kPi / 4.0), s) * std::pow(N, 1.5) * std::sqrt(kPi / t);
}

// ---------------------------------------------------------------- cylinder

namespace {

void check_level(int j) {
  if (j < 0) fail(ErrorCode::InvalidArgument, "j must be nonnegative");
  if (j > 5) fail(ErrorCode::LatticeTooLarge, "lattice sum too large for j > 5");
}

int lattice_extent(int j) {
  const double R = std::ldexp(1.0, 3 * j);
  return static_cast<int>(std::floor(1.6 * R));
}

constexpr int kCylinderYCount = 5;
constexpr double kCylinderY[kCylinderYCount] = {0.0, kPi / 4, kPi / 2, 3 * kPi / 4, kPi};

// Coefficients of A(a; y) = sum_n c_n(y) exp(i n^2 a) folded onto n >= 0.
class Lattice {
 public:
  Lattice(int j, const std::vector<double>& ys) : ny_(ys.size()) {
    const double R = std::ldexp(1.0, 3 * j);
    nmax_ = lattice_extent(j);
    coef_.resize(static_cast<size_t>(nmax_ + 1) * ny_);
    for (int n = 0; n <= nmax_; ++n) {
      const double c = psi0(n / R);
      for (size_t k = 0; k < ny_; ++k)
        coef_[static_cast<size_t>(n) * ny_ + k] = n == 0 ? c * c : 2.0 * c * c * std::cos(n * ys[k]);
    }
  }

  // out[k] = A(a; ys[k]); exp(i n^2 a) by the recurrence in n, re-anchored every 256 terms.
  void eval(double a, cd* out) const {
    for (size_t k = 0; k < ny_; ++k) out[k] = coef_[k];
    cd z, step;
    const cd step2 = std::polar(1.0, 2.0 * a);
    for (int n = 1; n <= nmax_; ++n) {
      if ((n - 1) % 256 == 0) {
        const double nn = n;
        z = std::polar(1.0, nn * nn * a);
        step = std::polar(1.0, (2.0 * nn + 1.0) * a);
      } else {
        z *= step;
        step *= step2;
      }
      const double* c = &coef_[static_cast<size_t>(n) * ny_];
      for (size_t k = 0; k < ny_; ++k) out[k] += c[k] * z;
    }
  }

 private:
  size_t ny_;
  int nmax_ = 0;
  std::vector<double> coef_;
};

double cylinder_phase_bound(int j, double t) {
  const double xi_max = std::ldexp(1.0, j + 2);
  const double xi_min = std::ldexp(1.0, j - 2);
  const double n = lattice_extent(j);
  return 5.0 * t * std::pow(xi_max, 4) + n * n * t / (xi_min * xi_min);
}

}  // namespace

cd lattice_sum(int j, double a, double y) {
  check_level(j);
  const double R = std::ldexp(1.0, 3 * j);
  cd s = 0.0;
  const int nmax = lattice_extent(j);
  for (int n = -nmax; n <= nmax; ++n) {
    const double c = psi0(n / R);
    s += c * c * std::polar(1.0, n * y + static_cast<double>(n) * n * a);
  }
  return s;
}

double cylinder_kernel_value(int j, double x, double y, double t) {
  check_level(j);
  if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "t must be positive");
  const double N = std::ldexp(1.0, j);
  auto g = [&](double xi) -> cd {
    const double c = psi1(xi / N);
    if (c == 0.0) return 0.0;
    const double x2 = xi * xi;
    return c * c * std::polar(1.0, t * x2 * x2 * xi) * lattice_sum(j, t / xi, y);
  };
  const Nodes q = make_nodes(N / 4.0, 4.0 * N, cylinder_phase_bound(j, t) + std::abs(x));
  return 2.0 * streamed_sum(g, q, x).real();
}

CylinderSup cylinder_sup_at(int j, double t) {
  check_level(j);
  if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "t must be positive");
  const double N = std::ldexp(1.0, j);
  const double bound = cylinder_phase_bound(j, t);
  const double h = bound + 2.0 * kPi;
  const Nodes q = make_nodes(N / 4.0, 4.0 * N, bound + h);
  const std::vector<double> ys(std::begin(kCylinderY), std::end(kCylinderY));
  const Lattice lattice(j, ys);

  std::vector<std::vector<cd>> gv(ys.size(), std::vector<cd>(static_cast<size_t>(q.m)));
  cd A[kCylinderYCount];
  for (long k = 0; k < q.m; ++k) {
    const double xi = q.a + static_cast<double>(k) * q.delta;
    const double c = psi1(xi / N);
    if (c == 0.0) continue;
    lattice.eval(t / xi, A);
    const double x2 = xi * xi;
    const cd e = c * c * std::polar(1.0, t * x2 * x2 * xi);
    for (size_t y = 0; y < ys.size(); ++y) gv[y][static_cast<size_t>(k)] = e * A[y];
  }

  CylinderSup best;
  best.j = j;
  best.t = t;
  best.value = -1.0;
  OscillatorySup win;
  for (size_t y = 0; y < ys.size(); ++y) {
    const OscillatorySup s = sup_from_samples(gv[y], q, 16.0 * N, 1.0, -h, h);
    if (s.value > best.value) {
      best.value = s.value;
      best.x = s.x;
      best.y = ys[y];
      win = s;
    }
  }
  gv.clear();

  const Lattice single(j, {best.y});
  auto g = [&](double xi) -> cd {
    const double c = psi1(xi / N);
    if (c == 0.0) return 0.0;
    cd a;
    single.eval(t / xi, &a);
    const double x2 = xi * xi;
    return c * c * std::polar(1.0, t * x2 * x2 * xi) * a;
  };
  check_refinement(g, q, 1.0, win);
  best.refinement_change = win.refinement_change;
  return best;
}

CylinderSup cylinder_sup(int j, int l, int t_samples) {
  check_level(j);
  if (l < 2 * j || l > 2 * j + 10) fail(ErrorCode::InvalidArgument, "need 2j <= l <= 2j + 10");
  if (t_samples < 1) fail(ErrorCode::InvalidArgument, "t_samples must be positive");
  CylinderSup best;
  best.value = -1.0;
  for (int k = 0; k < t_samples; ++k) {
    const double t = std::ldexp(1.0, -l) * std::exp2(static_cast<double>(k) / t_samples);
    CylinderSup s = cylinder_sup_at(j, t);
    if (s.value > best.value) best = s;
  }
  best.l = l;
  return best;
}

std::vector<double> cylinder_bound_exponents() { return {0.9, -2.7}; }

std::vector<DecaySample> cylinder_samples(int j, int l_min, int l_max, int t_samples) {
  check_level(j);
  if (l_min < 2 * j || l_max > 2 * j + 10 || l_min > l_max)
    fail(ErrorCode::InvalidArgument, "need 2j <= l_min <= l_max <= 2j + 10");
  if (t_samples < 1) fail(ErrorCode::InvalidArgument, "t_samples must be positive");
  std::vector<DecaySample> out;
  for (int l = l_min; l <= l_max; ++l)
    for (int k = 0; k < t_samples; ++k) {
      const double t = std::ldexp(1.0, -l) * std::exp2(static_cast<double>(k) / t_samples);
      out.push_back({{std::ldexp(1.0, l), std::ldexp(1.0, j)}, cylinder_sup_at(j, t).value});
    }
  return out;
}

DecayFit cylinder_kernel(int j, int l_min, int l_max, int t_samples) {
  return fit_exponents(cylinder_samples(j, l_min, l_max, t_samples), cylinder_bound_exponents(), {"2^l", "2^j"});
}

cd poisson_images(int j, double a, double y, int nu_min, int nu_max) {
  check_level(j);
  if (nu_min < 0 || nu_max < nu_min) fail(ErrorCode::InvalidArgument, "need 0 <= nu_min <= nu_max");
  const double R = std::ldexp(1.0, 3 * j);
  const double L = 1.6 * R;
  const double omega = std::abs(y) + 2.0 * kPi * nu_max + 2.0 * std::abs(a) * L;
  const Nodes q = make_nodes(-L, L, omega);
  std::vector<cd> gv(static_cast<size_t>(q.m));
  for (long k = 0; k < q.m; ++k) {
    const double eta = q.a + static_cast<double>(k) * q.delta;
    const double c = psi0(eta / R);
    gv[static_cast<size_t>(k)] = c * c * std::polar(1.0, a * eta * eta);
  }
  cd s = 0.0;
  for (int nu = nu_min; nu <= nu_max; ++nu) {
    s += stored_sum(gv, q, y + 2.0 * kPi * nu);
    if (nu != 0) s += stored_sum(gv, q, y - 2.0 * kPi * nu);
  }
  return s;
}

double poisson_tail_max(int j, int nu_max) {
  check_level(j);
  const double N = std::ldexp(1.0, j);
  double worst = 0.0;
  for (double t : {std::ldexp(1.0, -(2 * j + 6)), std::ldexp(1.0, 1 - 2 * j)})
    for (double xi : {N / 4.0, 4.0 * N})
      for (double y : kCylinderY) worst = std::max(worst, std::abs(poisson_images(j, t / xi, y, 100, nu_max)));
  return worst;
}

double psi1_integral(int power) {
  const Nodes q = make_nodes(0.25, 4.0, 0.0);
  double s = 0.0;
  for (long k = 0; k < q.m; ++k) s += std::pow(psi1(q.a + static_cast<double>(k) * q.delta), power);
  return 2.0 * s * q.delta;
}

double psi0_squared_lattice_sum(int j) {
  check_level(j);
  const double R = std::ldexp(1.0, 3 * j);
  double s = 0.0;
  const int nmax = lattice_extent(j);
  for (int n = -nmax; n <= nmax; ++n) {
    const double c = psi0(n / R);
    s += c * c;
  }
  return s;
}

// ---------------------------------------------------------------- fits

std::vector<double> log_space(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) fail(ErrorCode::InvalidArgument, "bad log_space range");
  std::vector<double> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    v[static_cast<size_t>(i)] = n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return v;
}

std::vector<DecaySample> phase1d_samples(const std::vector<double>& N, const std::vector<double>& tau) {
  std::vector<DecaySample> out;
  for (double n : N)
    for (double ta : tau) {
      const double t = ta / std::pow(n, 5);
      out.push_back({{t, n}, phase1d_sup(n, t).value});
    }
  return out;
}

std::vector<DecaySample> kernel2d_samples(const std::vector<double>& N, const std::vector<double>& tau) {
  std::vector<DecaySample> out;
  for (double n : N)
    for (double ta : tau) {
      const double t = ta / std::pow(n, 5);
      out.push_back({{t, n}, kernel2d_sup(n, t).value});
    }
  return out;
}

DecayFit fit_exponents(const std::vector<DecaySample>& samples, const std::vector<double>& bound_exponents,
                       const std::vector<std::string>& names) {
  if (samples.empty()) fail(ErrorCode::InsufficientSamples, "no samples");
  const size_t np = samples.front().params.size();
  if (bound_exponents.size() != np) fail(ErrorCode::InvalidArgument, "bound exponent count mismatch");
  for (const auto& s : samples) {
    if (s.params.size() != np) fail(ErrorCode::InvalidArgument, "inconsistent parameter count");
    if (!(s.value > 0.0) || !std::isfinite(s.value)) fail(ErrorCode::InvalidArgument, "magnitudes must be positive");
    for (double p : s.params)
      if (!(p > 0.0) || !std::isfinite(p)) fail(ErrorCode::InvalidArgument, "parameters must be positive");
  }

  std::vector<size_t> varied;
  double max_decades = 0.0;
  for (size_t k = 0; k < np; ++k) {
    double lo = samples.front().params[k], hi = lo;
    for (const auto& s : samples) {
      lo = std::min(lo, s.params[k]);
      hi = std::max(hi, s.params[k]);
    }
    if (hi > lo * (1.0 + 1e-12)) {
      varied.push_back(k);
      max_decades = std::max(max_decades, std::log10(hi / lo));
    }
  }
  const size_t n = samples.size();
  if (n < 5 * std::max<size_t>(varied.size(), 1))
    fail(ErrorCode::InsufficientSamples, "need at least 5 samples per varied parameter");
  if (static_cast<double>(n) < 5.0 * max_decades)
    fail(ErrorCode::InsufficientSamples, "need at least 5 samples per decade");

  DecayFit fit;
  fit.names = names;
  fit.samples = samples;
  fit.bound_exponents = bound_exponents;
  fit.slopes.assign(np, std::numeric_limits<double>::quiet_NaN());
  fit.slope_errors.assign(np, std::numeric_limits<double>::quiet_NaN());

  const Eigen::Index cols = static_cast<Eigen::Index>(varied.size()) + 1;
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), cols);
  Eigen::VectorXd Y(static_cast<Eigen::Index>(n));
  for (size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    X(r, 0) = 1.0;
    for (size_t c = 0; c < varied.size(); ++c)
      X(r, static_cast<Eigen::Index>(c) + 1) = std::log(samples[i].params[varied[c]]);
    Y(r) = std::log(samples[i].value);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < cols) fail(ErrorCode::InsufficientSamples, "parameters are collinear");
  const Eigen::VectorXd beta = qr.solve(Y);
  const Eigen::VectorXd resid = Y - X * beta;
  const double dof = static_cast<double>(n) - static_cast<double>(cols);
  const double sigma2 = dof > 0 ? resid.squaredNorm() / dof : 0.0;
  const Eigen::MatrixXd cov = sigma2 * (X.transpose() * X).inverse();
  fit.intercept = beta(0);
  for (size_t c = 0; c < varied.size(); ++c) {
    const auto e = static_cast<Eigen::Index>(c) + 1;
    fit.slopes[varied[c]] = beta(e);
    fit.slope_errors[varied[c]] = std::sqrt(std::max(cov(e, e), 0.0));
  }

  auto form = [&](const DecaySample& s) {
    double f = 1.0;
    for (size_t k = 0; k < np; ++k) f *= std::pow(s.params[k], bound_exponents[k]);
    return f;
  };
  double C = 0.0;
  for (const auto& s : samples) C = std::max(C, s.value / form(s));
  fit.bound_constant = C;
  for (const auto& s : samples)
    if (s.value > C * form(s) * (1.0 + kBoundSlack)) ++fit.violations;
  return fit;
}

}  // namespace kp5
