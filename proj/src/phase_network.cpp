#include "catft/phase_network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "catft/phase_meas.hpp"

namespace catft {

namespace {

long product(const std::vector<int>& d) {
  long p = 1;
  for (int x : d) p *= x;
  return p;
}

long stride_of(const std::vector<int>& dims, int axis) {
  long s = 1;
  for (int m = static_cast<int>(dims.size()) - 1; m > axis; --m) s *= dims[m];
  return s;
}

}  // namespace

int PhaseNetwork::factor_of(int mode) const {
  for (std::size_t i = 0; i < factors_.size(); ++i)
    for (int m : factors_[i].modes)
      if (m == mode) return static_cast<int>(i);
  throw InvalidDimension("mode " + std::to_string(mode) + " not present in network");
}

int PhaseNetwork::axis_of(const Factor& f, int mode) const {
  for (std::size_t i = 0; i < f.modes.size(); ++i)
    if (f.modes[i] == mode) return static_cast<int>(i);
  throw InvalidDimension("mode not in factor");
}

bool PhaseNetwork::has_mode(int mode) const {
  for (const auto& f : factors_)
    if (std::find(f.modes.begin(), f.modes.end(), mode) != f.modes.end()) return true;
  return false;
}

int PhaseNetwork::dim(int mode) const {
  const Factor& f = factors_[factor_of(mode)];
  return f.dims[axis_of(f, mode)];
}

void PhaseNetwork::normalize_factor(Factor& f) {
  const double n2 = f.amps.squaredNorm();
  if (!(n2 > 1e-300)) throw DegenerateError("network factor vanished");
  f.amps /= std::sqrt(n2);
}

void PhaseNetwork::add_factor(std::vector<int> modes, std::vector<int> dims, Vector amps) {
  if (modes.size() != dims.size() || modes.empty()) throw InvalidDimension("factor modes and dims differ");
  if (product(dims) != amps.size()) throw InvalidDimension("factor amplitude length mismatch");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (has_mode(modes[i])) throw InvalidDimension("mode " + std::to_string(modes[i]) + " already present");
    for (std::size_t j = 0; j < i; ++j)
      if (modes[j] == modes[i]) throw InvalidDimension("duplicate mode in factor");
  }
  Factor f{std::move(modes), std::move(dims), std::move(amps)};
  normalize_factor(f);
  factors_.push_back(std::move(f));
}

void PhaseNetwork::add_factor(const std::vector<int>& modes, const FockVector& state) {
  add_factor(modes, state.shape(), state.amplitudes());
}

void PhaseNetwork::add_edge(int a, int b, double angle) {
  if (a == b) throw InvalidDimension("CROT needs two distinct modes");
  factor_of(a);
  factor_of(b);
  for (auto& e : edges_)
    if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) {
      e.angle += angle;
      absorb_internal_edges();
      return;
    }
  edges_.push_back({a, b, angle});
  absorb_internal_edges();
}

void PhaseNetwork::absorb_internal_edges() {
  for (std::size_t i = 0; i < edges_.size();) {
    const int fa = factor_of(edges_[i].a), fb = factor_of(edges_[i].b);
    if (fa != fb) {
      ++i;
      continue;
    }
    Factor& f = factors_[fa];
    const int xa = axis_of(f, edges_[i].a), xb = axis_of(f, edges_[i].b);
    const long sa = stride_of(f.dims, xa), sb = stride_of(f.dims, xb);
    for (long idx = 0; idx < f.amps.size(); ++idx) {
      const long na = (idx / sa) % f.dims[xa], nb = (idx / sb) % f.dims[xb];
      f.amps[idx] *= std::polar(1.0, edges_[i].angle * static_cast<double>(na * nb));
    }
    edges_.erase(edges_.begin() + i);
  }
}

void PhaseNetwork::rename(int from, int to) {
  if (from == to) return;
  if (has_mode(to)) throw InvalidDimension("rename target already present");
  Factor& f = factors_[factor_of(from)];
  f.modes[axis_of(f, from)] = to;
  for (auto& e : edges_) {
    if (e.a == from) e.a = to;
    if (e.b == from) e.b = to;
  }
}

void PhaseNetwork::apply_diagonal(int mode, const Vector& d) {
  Factor& f = factors_[factor_of(mode)];
  const int ax = axis_of(f, mode);
  const long dm = f.dims[ax];
  if (d.size() != dm) throw InvalidDimension("diagonal length mismatch");
  const long inner = stride_of(f.dims, ax);
  const long outer = f.amps.size() / (inner * dm);
  for (long o = 0; o < outer; ++o)
    for (long n = 0; n < dm; ++n) {
      cplx* p = f.amps.data() + (o * dm + n) * inner;
      for (long j = 0; j < inner; ++j) p[j] *= d[n];
    }
}

void PhaseNetwork::rotate(int mode, double theta) {
  if (theta == 0.0) return;
  apply_diagonal(mode, rotation_phases(theta, dim(mode)));
}

double PhaseNetwork::apply_lowering(int mode, int k, const Vector& coeffs) {
  Factor& f = factors_[factor_of(mode)];
  const int ax = axis_of(f, mode);
  const long dm = f.dims[ax];
  if (k < 0) throw DomainError("negative lowering");
  if (coeffs.size() != std::max<long>(dm - k, 0)) throw InvalidDimension("lowering coefficient length mismatch");
  const long inner = stride_of(f.dims, ax);
  const long outer = f.amps.size() / (inner * dm);
  for (long o = 0; o < outer; ++o) {
    cplx* base = f.amps.data() + o * dm * inner;
    for (long n = 0; n < dm; ++n) {
      cplx* p = base + n * inner;
      if (n + k < dm) {
        const cplx* q = base + (n + k) * inner;
        for (long j = 0; j < inner; ++j) p[j] = coeffs[n] * q[j];
      } else {
        for (long j = 0; j < inner; ++j) p[j] = 0.0;
      }
    }
  }
  const double n2 = f.amps.squaredNorm();
  normalize_factor(f);
  if (k > 0) {
    std::vector<std::pair<int, double>> partners;
    for (const auto& e : edges_) {
      if (e.a == mode) partners.push_back({e.b, e.angle});
      if (e.b == mode) partners.push_back({e.a, e.angle});
    }
    for (const auto& [y, ang] : partners) rotate(y, k * ang);
  }
  return n2;
}

std::vector<double> PhaseNetwork::populations(int mode) const {
  const Factor& f = factors_[factor_of(mode)];
  const int ax = axis_of(f, mode);
  const long dm = f.dims[ax];
  const long inner = stride_of(f.dims, ax);
  const long outer = f.amps.size() / (inner * dm);
  std::vector<double> p(dm, 0.0);
  for (long o = 0; o < outer; ++o)
    for (long n = 0; n < dm; ++n) {
      const cplx* q = f.amps.data() + (o * dm + n) * inner;
      double s = 0.0;
      for (long j = 0; j < inner; ++j) s += std::norm(q[j]);
      p[n] += s;
    }
  return p;
}

std::vector<cplx> PhaseNetwork::outcome_coeffs(int mode) const {
  const Factor& f = factors_[factor_of(mode)];
  const int ax = axis_of(f, mode);
  const int dm = f.dims[ax];
  const long inner = stride_of(f.dims, ax);
  const long outer = f.amps.size() / (inner * dm);
  std::vector<cplx> c(dm, cplx(0.0));
  for (long o = 0; o < outer; ++o)
    for (long j = 0; j < inner; ++j) {
      const cplx* p = f.amps.data() + o * dm * inner + j;
      for (int m = 0; m < dm; ++m) {
        cplx acc = 0.0;
        for (int n = 0; n + m < dm; ++n) acc += p[(n + m) * inner] * std::conj(p[n * inner]);
        c[m] += acc;
      }
    }
  for (const auto& e : edges_) {
    if (e.a != mode && e.b != mode) continue;
    const int y = e.a == mode ? e.b : e.a;
    const std::vector<double> py = populations(y);
    // characteristic function of the partner's photon number at m * angle
    for (int m = 1; m < dm; ++m) {
      const cplx step = std::polar(1.0, m * e.angle);
      cplx z = 1.0, chi = 0.0;
      for (double pn : py) {
        chi += pn * z;
        z *= step;
      }
      c[m] *= chi;
    }
  }
  return c;
}

PhaseNetwork::Measurement PhaseNetwork::measure_phase(int mode, Rng& rng, int grid_size) {
  std::vector<cplx> c = outcome_coeffs(mode);
  PhaseDensity q(c);
  const double phi = q.sample(rng, grid_size);
  return contract(mode, phi, &c);
}

PhaseNetwork::Measurement PhaseNetwork::project_phase(int mode, double phi) { return contract(mode, phi, nullptr); }

PhaseNetwork::Measurement PhaseNetwork::contract(int mode, double phi, const std::vector<cplx>*) {
  const int fi = factor_of(mode);
  // partners: distinct factors, none equal to the measured one (internal edges are absorbed)
  std::vector<int> pmode, pfac;
  std::vector<double> pang;
  for (const auto& e : edges_) {
    if (e.a != mode && e.b != mode) continue;
    const int y = e.a == mode ? e.b : e.a;
    const int g = factor_of(y);
    if (g == fi || std::find(pfac.begin(), pfac.end(), g) != pfac.end())
      throw DomainError("measurement partners must live in distinct factors");
    pmode.push_back(y);
    pfac.push_back(g);
    pang.push_back(e.angle);
  }

  const Factor& f = factors_[fi];
  const int ax = axis_of(f, mode);
  const int dm = f.dims[ax];
  const long inner = stride_of(f.dims, ax);
  const long outer = f.amps.size() / (inner * dm);
  const long nrest = outer * inner;
  std::vector<int> rest_modes, rest_dims;
  for (std::size_t i = 0; i < f.modes.size(); ++i)
    if (static_cast<int>(i) != ax) {
      rest_modes.push_back(f.modes[i]);
      rest_dims.push_back(f.dims[i]);
    }

  // partner tuple space (n_Y1, n_Y2, ...), first partner slowest
  std::vector<int> pdim;
  for (int y : pmode) pdim.push_back(dim(y));
  const long ntuple = product(pdim);

  // g(rest, tuple) = (1/sqrt(2pi)) sum_n F(n, rest) e^{i n (sum_j ang_j n_Yj - phi)}
  Matrix g(nrest, ntuple);
  std::vector<cplx> pw(dm);
  const double inv = 1.0 / std::sqrt(2.0 * kPi);
  for (long t = 0; t < ntuple; ++t) {
    double th = -phi;
    long rem = t;
    for (int j = static_cast<int>(pdim.size()) - 1; j >= 0; --j) {
      th += pang[j] * static_cast<double>(rem % pdim[j]);
      rem /= pdim[j];
    }
    const cplx step = std::polar(1.0, th);
    cplx z = inv;
    for (int n = 0; n < dm; ++n) {
      pw[n] = z;
      z *= step;
    }
    for (long o = 0; o < outer; ++o)
      for (long j = 0; j < inner; ++j) {
        const cplx* p = f.amps.data() + o * dm * inner + j;
        cplx acc = 0.0;
        for (int n = 0; n < dm; ++n) acc += p[n * inner] * pw[n];
        g(o * inner + j, t) = acc;
      }
  }

  // merged factor: rest modes, then each partner factor's modes
  std::vector<int> new_modes = rest_modes, new_dims = rest_dims;
  Vector pamps = Vector::Ones(1);
  std::vector<long> tuple_of;  // partner-combined index -> tuple index
  tuple_of.push_back(0);
  for (std::size_t j = 0; j < pfac.size(); ++j) {
    const Factor& pf = factors_[pfac[j]];
    const int pax = axis_of(pf, pmode[j]);
    const long ps = stride_of(pf.dims, pax);
    Vector na(pamps.size() * pf.amps.size());
    std::vector<long> nt(na.size());
    for (long a = 0; a < pamps.size(); ++a)
      for (long b = 0; b < pf.amps.size(); ++b) {
        na[a * pf.amps.size() + b] = pamps[a] * pf.amps[b];
        nt[a * pf.amps.size() + b] = tuple_of[a] * pdim[j] + (b / ps) % pdim[j];
      }
    pamps = std::move(na);
    tuple_of = std::move(nt);
    new_modes.insert(new_modes.end(), pf.modes.begin(), pf.modes.end());
    new_dims.insert(new_dims.end(), pf.dims.begin(), pf.dims.end());
  }
  Vector amps(nrest * pamps.size());
  for (long r = 0; r < nrest; ++r)
    for (long b = 0; b < pamps.size(); ++b) amps[r * pamps.size() + b] = g(r, tuple_of[b]) * pamps[b];

  Measurement out;
  out.phi = phi;
  out.density = amps.squaredNorm();
  if (!(out.density > 1e-300)) throw DegenerateError("phase measurement branch has zero density");

  std::vector<int> drop = pfac;
  drop.push_back(fi);
  std::sort(drop.rbegin(), drop.rend());
  for (int d : drop) factors_.erase(factors_.begin() + d);
  edges_.erase(std::remove_if(edges_.begin(), edges_.end(), [&](const Edge& e) { return e.a == mode || e.b == mode; }),
               edges_.end());
  if (!new_modes.empty()) {
    Factor nf{std::move(new_modes), std::move(new_dims), std::move(amps)};
    normalize_factor(nf);
    factors_.push_back(std::move(nf));
    absorb_internal_edges();
  }
  return out;
}

FockVector PhaseNetwork::to_dense(const std::vector<int>& order) const {
  std::vector<int> modes, dims;
  Vector v = Vector::Ones(1);
  for (const auto& f : factors_) {
    Vector nv(v.size() * f.amps.size());
    for (long a = 0; a < v.size(); ++a) nv.segment(a * f.amps.size(), f.amps.size()) = v[a] * f.amps;
    v = std::move(nv);
    modes.insert(modes.end(), f.modes.begin(), f.modes.end());
    dims.insert(dims.end(), f.dims.begin(), f.dims.end());
  }
  if (order.size() != modes.size()) throw InvalidDimension("to_dense order must list every mode");
  FockVector full(dims, v);
  auto pos = [&](int m) {
    auto it = std::find(modes.begin(), modes.end(), m);
    if (it == modes.end()) throw InvalidDimension("unknown mode in order");
    return static_cast<int>(it - modes.begin());
  };
  for (const auto& e : edges_) full = apply_crot_phase(full, e.angle, pos(e.a), pos(e.b));
  // permute axes to the requested order
  std::vector<int> src(order.size()), odims(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    src[i] = pos(order[i]);
    odims[i] = dims[src[i]];
  }
  std::vector<long> sstride(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) sstride[i] = stride_of(dims, static_cast<int>(i));
  Vector out(v.size());
  std::vector<int> idx(order.size(), 0);
  for (long t = 0; t < out.size(); ++t) {
    long s = 0;
    for (std::size_t i = 0; i < order.size(); ++i) s += idx[i] * sstride[src[i]];
    out[t] = full.amplitudes()[s];
    for (int i = static_cast<int>(order.size()) - 1; i >= 0; --i) {
      if (++idx[i] < odims[i]) break;
      idx[i] = 0;
    }
  }
  return FockVector(odims, std::move(out));
}

}  // namespace catft
