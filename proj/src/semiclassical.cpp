#include "hypflow/semiclassical.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>

#include "hypflow/linalg.hpp"

namespace hypflow {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// FFTW plans are cached per thread; only planning itself is serialized.
fftw_plan plan_for(int n, int sign) {
  thread_local std::map<std::pair<int, int>, fftw_plan> cache;
  auto it = cache.find({n, sign});
  if (it != cache.end()) return it->second;
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_complex* in = fftw_alloc_complex(static_cast<size_t>(n));
  fftw_complex* out = fftw_alloc_complex(static_cast<size_t>(n));
  fftw_plan p = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(in);
  fftw_free(out);
  cache[{n, sign}] = p;
  return p;
}

CVec run_fft(const CVec& u, int sign) {
  const int n = static_cast<int>(u.size());
  if (n == 0) return u;
  CVec in = u, out(n);
  fftw_execute_dft(plan_for(n, sign), reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

double wrap(double d, double L) {
  d = std::fmod(d + 0.5 * L, L);
  if (d < 0) d += L;
  return d - 0.5 * L;
}

int next_pow2(double v) {
  int n = 1;
  while (n < v && n < (1 << 30)) n <<= 1;
  return n;
}

}  // namespace

CVec fft(const CVec& u) { return run_fft(u, FFTW_FORWARD) / static_cast<double>(u.size()); }
CVec ifft(const CVec& uhat) { return run_fft(uhat, FFTW_BACKWARD); }

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

GridFunction::GridFunction(int comps, int nodes, double length, double x0)
    : n(nodes), L(length), origin(x0), values(CMat::Zero(comps, nodes)) {
  if (!is_power_of_two(nodes)) throw DomainError("GridFunction: node count must be a power of two");
  if (!(length > 0)) throw DomainError("GridFunction: length must be positive");
}

double GridFunction::wavenumber(int k) const {
  const int kk = k > n / 2 ? k - n : k;
  return 2 * kPi / L * kk;
}

CMat GridFunction::modes() const {
  CMat m(values.rows(), n);
  for (Eigen::Index r = 0; r < values.rows(); ++r) m.row(r) = fft(values.row(r).transpose()).transpose();
  return m;
}

GridFunction GridFunction::from_modes(const CMat& m, int nodes, double length, double x0) {
  GridFunction g(static_cast<int>(m.rows()), nodes, length, x0);
  for (Eigen::Index r = 0; r < m.rows(); ++r) g.values.row(r) = ifft(m.row(r).transpose()).transpose();
  return g;
}

GridFunction GridFunction::derivative() const {
  CMat m = modes();
  for (int k = 0; k < n; ++k) {
    const cplx f = (2 * k == n) ? cplx(0) : cplx(0, wavenumber(k));
    m.col(k) *= f;
  }
  return from_modes(m, n, L, origin);
}

double GridFunction::l2_norm() const { return std::sqrt(values.squaredNorm() * dx()); }
double GridFunction::max_abs() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }

void GridFunction::save_binary(std::ostream& os) const {
  const char magic[4] = {'H', 'Y', 'P', 'G'};
  os.write(magic, 4);
  const int32_t hdr[4] = {1, 1, comps(), n};
  os.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
  const double geo[2] = {L, origin};
  os.write(reinterpret_cast<const char*>(geo), sizeof geo);
  for (Eigen::Index r = 0; r < values.rows(); ++r)
    for (int j = 0; j < n; ++j) {
      const double re = values(r, j).real(), im = values(r, j).imag();
      os.write(reinterpret_cast<const char*>(&re), sizeof re);
      os.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
}

GridFunction GridFunction::load_binary(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "HYPG", 4) != 0) throw ConfigError("grid container: bad magic");
  int32_t hdr[4];
  is.read(reinterpret_cast<char*>(hdr), sizeof hdr);
  if (!is || hdr[0] != 1 || hdr[1] != 1) throw ConfigError("grid container: unsupported version or dimension");
  double geo[2];
  is.read(reinterpret_cast<char*>(geo), sizeof geo);
  GridFunction g(hdr[2], hdr[3], geo[0], geo[1]);
  for (int r = 0; r < hdr[2]; ++r)
    for (int j = 0; j < hdr[3]; ++j) {
      double re = 0, im = 0;
      is.read(reinterpret_cast<char*>(&re), sizeof re);
      is.read(reinterpret_cast<char*>(&im), sizeof im);
      g.values(r, j) = cplx(re, im);
    }
  if (!is) throw ConfigError("grid container: truncated payload");
  return g;
}

void GridFunction::write_csv(std::ostream& os) const {
  os << "x";
  for (int r = 0; r < comps(); ++r) os << ",re_u" << r << ",im_u" << r;
  os << "\n";
  os.precision(17);
  for (int j = 0; j < n; ++j) {
    os << x(j);
    for (int r = 0; r < comps(); ++r) os << "," << values(r, j).real() << "," << values(r, j).imag();
    os << "\n";
  }
}

CMat SymbolSampler::eval(double x, double xi, double eps, double h) const {
  return a(slow_x ? std::pow(eps, 1 - h) * x : x, xi);
}

SymbolSampler SymbolSampler::multiplier(std::function<CMat(double xi)> f, double order) {
  SymbolSampler s;
  s.a = [f](double, double xi) { return f(xi); };
  s.order = order;
  s.x_independent = true;
  return s;
}

SymbolSampler SymbolSampler::constant(const CMat& c) {
  return multiplier([c](double) { return c; }, 0);
}

GridFunction op_eps_apply(const SymbolSampler& a, const GridFunction& u, double eps, double h) {
  const int n = u.n, N = u.comps();
  const CMat m = u.modes();
  const double scale = std::pow(eps, h);

  double total = 0, tail = 0;
  int kmax = 0;
  for (int k = 0; k < n; ++k) {
    const double e = m.col(k).squaredNorm();
    const int kk = std::abs(k > n / 2 ? k - n : k);
    total += e;
    if (8 * kk > n) tail += e;
    if (e > 1e-24 * total) kmax = std::max(kmax, kk);
  }
  if (total > 0 && tail > 1e-6 * total)
    throw DomainError("op_eps_apply: grid under-resolves the datum, need at least " +
                      std::to_string(next_pow2(8.0 * kmax)) + " nodes (have " + std::to_string(n) + ")");

  if (a.x_independent) {
    CMat out(N, n);
    for (int k = 0; k < n; ++k) {
      const CMat s = a.eval(0.0, scale * u.wavenumber(k), eps, h);
      if (s.rows() != N || s.cols() != N) throw DomainError("op_eps_apply: symbol size mismatch");
      out.col(k) = s * m.col(k);
    }
    return GridFunction::from_modes(out, n, u.L, u.origin);
  }

  const double mmax = m.cwiseAbs().maxCoeff();
  GridFunction out(N, n, u.L, u.origin);
  for (int k = 0; k < n; ++k) {
    if (m.col(k).cwiseAbs().maxCoeff() <= 1e-16 * mmax) continue;
    const double xi = u.wavenumber(k);
    const CVec mk = m.col(k);
    for (int j = 0; j < n; ++j) {
      const double xj = u.x(j);
      const CMat s = a.eval(xj, scale * xi, eps, h);
      const cplx ph = std::exp(cplx(0, xi * (xj - u.origin)));
      out.values.col(j) += ph * (s * mk);
    }
  }
  return out;
}

double eps_sobolev_norm(const GridFunction& u, double s, double eps, double h) {
  const CMat m = u.modes();
  const double scale = std::pow(eps, h);
  double acc = 0;
  for (int k = 0; k < u.n; ++k) {
    const double w = s == 0 ? 1.0 : std::pow(1 + std::pow(scale * u.wavenumber(k), 2), s);
    acc += w * m.col(k).squaredNorm();
  }
  return std::sqrt(u.L * acc);
}

double plateau_cutoff(double r, double delta) {
  if (!(delta > 0.5)) throw DomainError("plateau_cutoff: delta must exceed 1/2");
  r = std::abs(r);
  if (r <= 0.5) return 1.0;
  if (r >= delta) return 0.0;
  const double s = (r - 0.5) / (delta - 0.5);
  auto f = [](double z) { return z > 0 ? std::exp(-1.0 / z) : 0.0; };
  const double a = f(1 - s), b = f(s);
  return a / (a + b);
}

int wavepacket_nodes(double xi0, double eps, double h, double delta, double L, int min_per_wave, int min_in_ball) {
  const double wave = 2 * kPi * eps / std::abs(xi0);
  const double need_wave = min_per_wave * L / wave;
  const double need_ball = min_in_ball * L / (2 * delta * std::pow(eps, 1 - h));
  return next_pow2(std::max(need_wave, need_ball));
}

GridFunction build_wavepacket(const WavePacketSpec& sp) {
  if (!(sp.eps > 0) || !(sp.h > 0) || sp.h > 1) throw DomainError("build_wavepacket: need eps > 0 and h in (0,1]");
  const int need = wavepacket_nodes(sp.xi0, sp.eps, sp.h, sp.delta, sp.L, sp.min_nodes_per_wave, sp.min_nodes_in_ball);
  if (sp.n < need)
    throw DomainError("build_wavepacket: grid under-resolves the packet, need at least " + std::to_string(need) +
                      " nodes (have " + std::to_string(sp.n) + ")");
  const double slow = std::pow(sp.eps, 1 - sp.h);
  const double fast = std::pow(sp.eps, sp.h);
  GridFunction g(sp.comps, sp.n, sp.L / slow, (sp.origin - sp.x0) / slow);
  for (int j = 0; j < sp.n; ++j) {
    const double y = wrap(sp.origin + sp.L / sp.n * j - sp.x0, sp.L) / slow;
    const double th = plateau_cutoff(y, sp.delta);
    if (th == 0) continue;
    CVec e = sp.ebar ? sp.ebar(y) : CVec(CVec::Unit(sp.comps, 0));
    if (e.size() != sp.comps) throw DomainError("build_wavepacket: direction has wrong size");
    g.values.col(j) = std::exp(cplx(0, y * sp.xi0 / fast)) * th * e;
  }
  if (sp.Qinv) g = op_eps_apply(*sp.Qinv, g, sp.eps, sp.h);
  GridFunction out(sp.comps, sp.n, sp.L, sp.origin);
  const double amp = std::pow(sp.eps, sp.K);
  out.values = amp * (sp.real_part ? CMat(g.values.real().cast<cplx>()) : g.values);
  return out;
}

namespace {

SymbolSampler product(const SymbolSampler& a, const SymbolSampler& b, double eps, double h) {
  SymbolSampler c;
  c.a = [a, b, eps, h](double x, double xi) { return CMat(a.eval(x, xi, eps, h) * b.eval(x, xi, eps, h)); };
  c.order = a.order + b.order;
  c.x_independent = a.x_independent && b.x_independent;
  return c;
}

}  // namespace

double composition_residual(const SymbolSampler& a, const SymbolSampler& b, double eps, double h,
                            const GridFunction& u) {
  const GridFunction lhs = op_eps_apply(a, op_eps_apply(b, u, eps, h), eps, h);
  const GridFunction rhs = op_eps_apply(product(a, b, eps, h), u, eps, h);
  GridFunction d = lhs;
  d.values -= rhs.values;
  return d.l2_norm() / u.l2_norm();
}

CompositionReport composition_order(const SymbolSampler& a, const SymbolSampler& b, const std::vector<double>& ladder,
                                    double h, const std::function<GridFunction(double eps)>& probe) {
  CompositionReport r;
  std::vector<double> lx, ly;
  for (double e : ladder) {
    const double res = composition_residual(a, b, e, h, probe(e));
    r.eps.push_back(e);
    r.residual.push_back(res);
    if (res > 1e-14) {
      lx.push_back(std::log(e));
      ly.push_back(std::log(res));
    }
  }
  if (lx.size() < 2) r.order = std::numeric_limits<double>::infinity();
  else r.order = fit_line(lx, ly).slope;
  return r;
}

double operator_norm_estimate(const SymbolSampler& a, double eps, double h, const std::vector<GridFunction>& probes) {
  double best = 0;
  for (const GridFunction& u : probes) {
    const double den = eps_sobolev_norm(u, -a.order, eps, h);
    if (den == 0) continue;
    best = std::max(best, op_eps_apply(a, u, eps, h).l2_norm() / den);
  }
  return best;
}

}  // namespace hypflow
