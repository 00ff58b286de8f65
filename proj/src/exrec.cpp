#include "catft/exrec.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <omp.h>

namespace catft {

void ExRecConfig::validate() const {
  gadget.validate();
  op_noise.validate();
  if (!(wait_mult >= 0.0) || !std::isfinite(wait_mult)) throw DomainError("wait_mult must be finite and >= 0");
  if (shots < 1) throw DomainError("shots must be >= 1");
  if (batches < 1) throw DomainError("batches must be >= 1");
  truncation.validate();
}

Matrix ChoiAccumulator::average() const {
  if (count < 1) throw DomainError("empty Choi accumulator");
  return sum_density / static_cast<double>(count);
}

Vector exrec_shot(const GadgetContext& ctx, const ExRecConfig& cfg, std::uint64_t shot) {
  Rng rng = make_stream(cfg.seed, shot);
  const GadgetNoise lead = GadgetNoise::uniform(cfg.op_noise, cfg.include_input_noise);
  const GadgetNoise trail = GadgetNoise::uniform(cfg.op_noise, false);
  PhaseNetwork net;
  net.add_factor({kModeRef, kModeIn}, choi_input(ctx.data_code()));
  const GadgetTrace t1 = run_gadget_network(ctx, net, lead, rng);
  apply_network_noise(net, kModeOut, cfg.op_noise.scaled(cfg.wait_mult), rng);
  net.rename(kModeOut, kModeIn);
  const GadgetTrace t2 = run_gadget_network(ctx, net, trail, rng);
  FockVector out = net.to_dense({kModeRef, kModeOut});
  apply_frame_to_reference(out, t1.frame * t2.frame);
  return out.amplitudes();
}

namespace {

ChoiAccumulator empty_accumulator(int dim_out, long shots, int batches) {
  ChoiAccumulator acc;
  acc.dim_out = dim_out;
  const long nb = std::min<long>(batches, shots);
  acc.sum_density = Matrix::Zero(2 * dim_out, 2 * dim_out);
  acc.batch_sums.assign(nb, Matrix::Zero(2 * dim_out, 2 * dim_out));
  acc.batch_counts.assign(nb, 0);
  return acc;
}

long batch_begin(long b, long nb, long shots) { return b * shots / nb; }

}  // namespace

ChoiAccumulator run_exrec(const ExRecConfig& cfg, int threads) {
  cfg.validate();
  GadgetContext ctx(cfg.gadget, cfg.truncation);
  return run_exrec(ctx, cfg, threads);
}

ChoiAccumulator run_exrec(const GadgetContext& ctx, const ExRecConfig& cfg, int threads) {
  cfg.validate();
  const int d = ctx.data_code().dim;
  ChoiAccumulator acc = empty_accumulator(d, cfg.shots, cfg.batches);
  const long nb = static_cast<long>(acc.batch_sums.size());
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  bool failed = false;
  std::string message;
  bool degenerate = false;
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
  for (long b = 0; b < nb; ++b) {
    const long s0 = batch_begin(b, nb, cfg.shots), s1 = batch_begin(b + 1, nb, cfg.shots);
    try {
      Matrix psi(2 * d, s1 - s0);
      for (long s = s0; s < s1; ++s) psi.col(s - s0) = exrec_shot(ctx, cfg, static_cast<std::uint64_t>(s));
      acc.batch_sums[b].noalias() = psi * psi.adjoint();
      acc.batch_counts[b] = s1 - s0;
    } catch (const std::exception& e) {
#pragma omp critical
      {
        failed = true;
        message = e.what();
        degenerate = dynamic_cast<const DegenerateError*>(&e) != nullptr;
      }
    }
  }
  if (failed) {
    if (degenerate) throw DegenerateError(message);
    throw Error(message);
  }
  for (long b = 0; b < nb; ++b) {
    acc.sum_density += acc.batch_sums[b];
    acc.count += acc.batch_counts[b];
  }
  return acc;
}

ChoiAccumulator run_exrec_serial(const ExRecConfig& cfg) {
  cfg.validate();
  GadgetContext ctx(cfg.gadget, cfg.truncation);
  const int d = ctx.data_code().dim;
  ChoiAccumulator acc = empty_accumulator(d, cfg.shots, cfg.batches);
  const long nb = static_cast<long>(acc.batch_sums.size());
  long b = 0;
  for (long s = 0; s < cfg.shots; ++s) {
    while (s >= batch_begin(b + 1, nb, cfg.shots)) ++b;
    const Vector v = exrec_shot(ctx, cfg, static_cast<std::uint64_t>(s));
    const Matrix outer = v * v.adjoint();
    acc.sum_density += outer;
    acc.batch_sums[b] += outer;
    acc.batch_counts[b] += 1;
    acc.count += 1;
  }
  return acc;
}

// ---- Petz

PetzDecoder::PetzDecoder(const Matrix& choi, double cutoff) {
  if (choi.rows() != choi.cols() || choi.rows() % 2 != 0) throw InvalidDimension("Choi must be (2D)x(2D)");
  dim_ = static_cast<int>(choi.rows() / 2);
  Matrix j = 0.5 * (choi + choi.adjoint());
  const double tr = j.trace().real();
  if (!(tr > 0.0)) throw DegenerateError("Choi state has zero trace");
  j /= tr;
  const int d = dim_;
  // E(1) = sum_j K_j K_j^dag = 2 Tr_ref J
  Matrix e1 = 2.0 * (j.topLeftCorner(d, d) + j.bottomRightCorner(d, d));
  Eigen::SelfAdjointEigenSolver<Matrix> es1(e1);
  s_ = Matrix::Zero(d, d);
  int kept = 0;
  for (int i = 0; i < d; ++i) {
    const double mu = es1.eigenvalues()[i];
    if (mu < cutoff) continue;
    ++kept;
    s_ += (1.0 / std::sqrt(mu)) * es1.eigenvectors().col(i) * es1.eigenvectors().col(i).adjoint();
  }
  if (kept == 0) throw DegenerateError("E(P) is singular beyond the pseudo-inverse cutoff");

  Eigen::SelfAdjointEigenSolver<Matrix> es(j);
  std::vector<int> keep;
  for (int i = 0; i < 2 * d; ++i)
    if (es.eigenvalues()[i] > 1e-15) keep.push_back(i);
  lam_.resize(keep.size());
  vecs_.resize(2 * d, keep.size());
  w_.resize(2 * d, keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    lam_[c] = es.eigenvalues()[keep[c]];
    vecs_.col(c) = es.eigenvectors().col(keep[c]);
    const double sl = std::sqrt(lam_[c].real());
    w_.col(c).head(d) = sl * (s_ * vecs_.col(c).head(d));
    w_.col(c).tail(d) = sl * (s_ * vecs_.col(c).tail(d));
  }
}

double PetzDecoder::entanglement_fidelity(const Matrix& choi) const {
  if (choi.rows() != 2 * dim_) throw InvalidDimension("Choi dimension differs from the decoder's");
  const double tr = choi.trace().real();
  return (w_.adjoint() * choi * w_).trace().real() / tr;
}

Eigen::Matrix4cd PetzDecoder::logical_choi(const Matrix& choi) const {
  const int d = dim_;
  const Matrix j = choi / choi.trace().real();
  Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
  Matrix t = Matrix::Zero(4, 2 * d);
  for (int c = 0; c < lam_.size(); ++c) {
    // R_c = K_c^dag S with K_c = sqrt(2 lambda) [v^(0) v^(1)]
    const double sl = std::sqrt(2.0 * lam_[c].real());
    Matrix k(d, 2);
    k.col(0) = sl * vecs_.col(c).head(d);
    k.col(1) = sl * vecs_.col(c).tail(d);
    const Matrix r = k.adjoint() * s_;  // 2 x d
    t.setZero();
    t.block(0, 0, 2, d) = r;
    t.block(2, d, 2, d) = r;
    out += t * j * t.adjoint();
  }
  return out;
}

PetzResult petz_decode(const Matrix& choi_avg, double cutoff) {
  PetzDecoder dec(choi_avg, cutoff);
  PetzResult r;
  r.f_ent = dec.entanglement_fidelity(choi_avg);
  r.logical_choi = dec.logical_choi(choi_avg);
  return r;
}

double benchmark_entanglement_fidelity(double gamma_loss, double gamma_ph) {
  NoiseStrength s{gamma_loss, gamma_ph};
  s.validate();
  if (s.is_zero()) return 1.0;  // exact; the channel route leaves round-off
  const int d = 4;
  Vector phi = Vector::Zero(2 * d);
  phi[0] = phi[d + 1] = 1.0 / std::sqrt(2.0);
  const Matrix rho = phi * phi.adjoint();
  const Matrix out = location_channel(rho, {2, d}, 1, s);
  return (phi.adjoint() * out * phi).value().real();
}

double benchmark_infidelity(double gamma_loss, double gamma_ph) {
  return infidelity_from_fent(benchmark_entanglement_fidelity(gamma_loss, gamma_ph));
}

FidelityReport fidelity_report(const ChoiAccumulator& acc, double inf_bm, int resamples, std::uint64_t seed) {
  FidelityReport rep;
  rep.shots = acc.count;
  rep.f_ent = petz_decode(acc.average()).f_ent;
  rep.inf = infidelity_from_fent(rep.f_ent);
  rep.inf_bm = inf_bm;
  if (inf_bm > 0.0) rep.ratio = rep.inf / inf_bm;
  const long nb = static_cast<long>(acc.batch_sums.size());
  if (resamples > 1 && nb > 1) {
    Rng rng(seed);
    std::uniform_int_distribution<long> pick(0, nb - 1);
    double s1 = 0.0, s2 = 0.0;
    for (int r = 0; r < resamples; ++r) {
      Matrix sum = Matrix::Zero(acc.sum_density.rows(), acc.sum_density.cols());
      long cnt = 0;
      for (long i = 0; i < nb; ++i) {
        const long b = pick(rng);
        sum += acc.batch_sums[b];
        cnt += acc.batch_counts[b];
      }
      const Matrix j = sum / static_cast<double>(cnt);
      const double inf = infidelity_from_fent(PetzDecoder(j).entanglement_fidelity(j));
      s1 += inf;
      s2 += inf * inf;
    }
    const double m = s1 / resamples;
    rep.standard_error = std::sqrt(std::max(0.0, s2 / resamples - m * m) * resamples / (resamples - 1.0));
  }
  if (inf_bm > 0.0) rep.ratio_stderr = rep.standard_error / inf_bm;
  return rep;
}

}  // namespace catft
