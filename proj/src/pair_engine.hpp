#pragma once

// Evaluates several regularized kernels over all node pairs i < j of a
// composite quadrature, sharing the distance, error-function and
// trigonometric work between operators. Rows are processed in blocks of
// contiguous j so the inner loops stay cache- and vector-friendly.
// Internal header.

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Core>

#include "erfreg/quadrature.hpp"
#include "kernel_formulas.hpp"

namespace erfreg::detail {

inline constexpr Eigen::Index kPairBlock = 128;

template <int N>
void horner_fixed(const double* c, const double* x, double* out, Eigen::Index len) {
  for (Eigen::Index jj = 0; jj < len; ++jj) {
    double acc = c[N - 1];
    for (int m = N - 2; m >= 0; --m) acc = acc * x[jj] + c[m];
    out[jj] = acc;
  }
}

// out[jj] = sum_m c[m] x[jj]^m with the degree fixed at compile time so the
// jj loop vectorizes.
inline void horner_block(const double* c, int n, const double* x, double* out, Eigen::Index len) {
  switch (n) {
    case 0: std::fill(out, out + len, 0.0); return;
    case 1: std::fill(out, out + len, c[0]); return;
    case 2: return horner_fixed<2>(c, x, out, len);
    case 3: return horner_fixed<3>(c, x, out, len);
    case 4: return horner_fixed<4>(c, x, out, len);
    case 5: return horner_fixed<5>(c, x, out, len);
    case 6: return horner_fixed<6>(c, x, out, len);
    case 7: return horner_fixed<7>(c, x, out, len);
    case 8: return horner_fixed<8>(c, x, out, len);
    case 9: return horner_fixed<9>(c, x, out, len);
    case 10: return horner_fixed<10>(c, x, out, len);
    case 11: return horner_fixed<11>(c, x, out, len);
    case 12: return horner_fixed<12>(c, x, out, len);
    case 13: return horner_fixed<13>(c, x, out, len);
    case 14: return horner_fixed<14>(c, x, out, len);
    case 15: return horner_fixed<15>(c, x, out, len);
    default: return horner_fixed<16>(c, x, out, len);
  }
}

// Kernel values for one row block: k(i, j0 + jj) and k(j0 + jj, i), split
// into real and imaginary arrays per context.
struct PairBlock {
  Eigen::Index i = 0, j0 = 0, len = 0;
  std::vector<const double*> ij_re, ij_im, ji_re, ji_im;
};

class PairEngine {
 public:
  PairEngine(const CompositeQuadrature& quad, const std::vector<KernelContext>& ctxs) : n_(quad.size()) {
    px_ = quad.points.row(0).transpose();
    py_ = quad.points.row(1).transpose();
    pz_ = quad.points.row(2).transpose();
    nx_ = quad.normals.row(0).transpose();
    ny_ = quad.normals.row(1).transpose();
    nz_ = quad.normals.row(2).transpose();
    for (const auto& ctx : ctxs) {
      coeffs_.push_back(make_coeffs(ctx));
      const KernelCoeffs& c = coeffs_.back();
      radial_of_.push_back(radial_index(c));
      dgroup_.push_back(group_index(deltas_, c.delta));
      kgroup_.push_back(group_index(ks_, c.k));
    }
    tcut_.assign(deltas_.size(), 0.0);
    for (std::size_t c = 0; c < coeffs_.size(); ++c)
      tcut_[dgroup_[c]] = std::max(tcut_[dgroup_[c]], coeffs_[c].t_cut);
    for (const auto& rc : radial_)
      radial_dgroup_.push_back(group_index(deltas_, rc.delta)), radial_kgroup_.push_back(group_index(ks_, rc.k));
  }

  Eigen::Index size() const { return n_; }
  std::size_t contexts() const { return coeffs_.size(); }
  const KernelCoeffs& coeffs(std::size_t c) const { return coeffs_[c]; }

  // diag(i, kii[]) once per node; block(const PairBlock&) once per row block
  // covering every j > i exactly once.
  template <class DiagSink, class BlockSink>
  void run(DiagSink&& diag, BlockSink&& block) const {
    const std::size_t nc = coeffs_.size(), nr = radial_.size();
    const std::size_t nd = deltas_.size(), nk = ks_.size();
    const std::size_t B = static_cast<std::size_t>(kPairBlock);
    using Buf = std::vector<double>;
    auto bufs = [B](std::size_t count) { return std::vector<Buf>(count, Buf(B, 0.0)); };
    Buf r(B), inv_r(B), inv_r3(B), inv_r5(B), a(B), b(B), nn(B);
    // Per delta group: t^2, erf(t) and (2/sqrt(pi)) t exp(-t^2); both are
    // replaced by (1, 0) beyond the group cutoff where sigma == 1.
    std::vector<Buf> t_of = bufs(nd), t2_of = bufs(nd), E_of = bufs(nd), GT_of = bufs(nd);
    std::vector<std::vector<Eigen::Index>> near(nd);
    // Per wavenumber group and family (S, K-like, W): Phi and the smooth
    // imaginary part, both scaled by 1/(4 pi).
    std::vector<Buf> phi_of = bufs(3 * nk), im_of = bufs(3 * nk);
    std::vector<Buf> rad_re = bufs(nr), acc = bufs(1);
    std::vector<Buf> ij_re = bufs(nc), ij_im = bufs(nc), ji_re = bufs(nc), ji_im = bufs(nc);
    PairBlock pb;
    for (std::size_t c = 0; c < nc; ++c) {
      pb.ij_re.push_back(ij_re[c].data());
      pb.ij_im.push_back(ij_im[c].data());
      pb.ji_re.push_back(ji_re[c].data());
      pb.ji_im.push_back(ji_im[c].data());
    }
    std::vector<std::complex<double>> kii(nc);
    for (std::size_t c = 0; c < nc; ++c) kii[c] = coeffs_[c].diagonal;

    for (Eigen::Index i = 0; i < n_; ++i) {
      diag(i, kii.data());
      const double xi = px_[i], yi = py_[i], zi = pz_[i];
      const double nxi = nx_[i], nyi = ny_[i], nzi = nz_[i];
      for (Eigen::Index j0 = i + 1; j0 < n_; j0 += kPairBlock) {
        const Eigen::Index len = std::min(kPairBlock, n_ - j0);
        const double* PX = px_.data() + j0;
        const double* PY = py_.data() + j0;
        const double* PZ = pz_.data() + j0;
        const double* NX = nx_.data() + j0;
        const double* NY = ny_.data() + j0;
        const double* NZ = nz_.data() + j0;
        for (Eigen::Index jj = 0; jj < len; ++jj) {
          const double dx = xi - PX[jj], dy = yi - PY[jj], dz = zi - PZ[jj];
          const double rr = std::sqrt(dx * dx + dy * dy + dz * dz);
          const double ir = 1.0 / rr;
          r[jj] = rr;
          inv_r[jj] = ir;
          inv_r3[jj] = ir * ir * ir;
          inv_r5[jj] = inv_r3[jj] * ir * ir;
          a[jj] = NX[jj] * dx + NY[jj] * dy + NZ[jj] * dz;  // nu_j . (x_i - x_j)
          b[jj] = nxi * dx + nyi * dy + nzi * dz;           // nu_i . (x_i - x_j)
          nn[jj] = nxi * NX[jj] + nyi * NY[jj] + nzi * NZ[jj];
        }
        for (std::size_t g = 0; g < nd; ++g) {
          const double inv = 1.0 / deltas_[g], hi = tcut_[g];
          double* T = t_of[g].data();
          double* T2 = t2_of[g].data();
          double* E = E_of[g].data();
          double* GT = GT_of[g].data();
          near[g].clear();
          for (Eigen::Index jj = 0; jj < len; ++jj) {
            const double t = r[jj] * inv;
            T[jj] = t;
            T2[jj] = t * t;
            if (t >= hi) {
              E[jj] = 1.0;
              GT[jj] = 0.0;
            } else {
              if (t < kSigmaSeriesThreshold) near[g].push_back(jj);
              const double gauss = std::exp(-t * t);
              E[jj] = std::erf(t);
              GT[jj] = (2.0 / kSqrtPi) * gauss * t;
            }
          }
        }
        for (std::size_t g = 0; g < nk; ++g) {
          const double k = ks_[g];
          double* PS = phi_of[3 * g].data();
          double* PK = phi_of[3 * g + 1].data();
          double* PW = phi_of[3 * g + 2].data();
          double* IS = im_of[3 * g].data();
          double* IK = im_of[3 * g + 1].data();
          double* IW = im_of[3 * g + 2].data();
          if (k == 0.0) {
            for (Eigen::Index jj = 0; jj < len; ++jj) {
              PS[jj] = PK[jj] = kInvFourPi;
              PW[jj] = -3.0 * kInvFourPi;
              IS[jj] = IK[jj] = IW[jj] = 0.0;
            }
            continue;
          }
          const double k3 = k * k * k, k5 = k3 * k * k;
          for (Eigen::Index jj = 0; jj < len; ++jj) {
            const double z = k * r[jj];
            const double cz = std::cos(z), sz = std::sin(z);
            PS[jj] = cz * kInvFourPi;
            PK[jj] = (cz + z * sz) * kInvFourPi;
            PW[jj] = ((z * z - 3.0) * cz - 3.0 * z * sz) * kInvFourPi;
            if (z < kSmoothSeriesThreshold) {
              IS[jj] = k * sinc_series(z) * kInvFourPi;
              IK[jj] = k3 * dipole_series(z) * kInvFourPi;
              IW[jj] = k5 * quadrupole_series(z) * kInvFourPi;
            } else {
              IS[jj] = sz * inv_r[jj] * kInvFourPi;
              IK[jj] = (sz - z * cz) * inv_r3[jj] * kInvFourPi;
              IW[jj] = (3.0 * z * cz + (z * z - 3.0) * sz) * inv_r5[jj] * kInvFourPi;
            }
          }
        }
        double* A = acc[0].data();
        for (std::size_t u = 0; u < nr; ++u) {
          const KernelCoeffs& rc = radial_[u];
          const int dg = radial_dgroup_[u], kg = radial_kgroup_[u], fam = family_slot(rc.kind);
          const double* T = t_of[dg].data();
          const double* T2 = t2_of[dg].data();
          const double* E = E_of[dg].data();
          const double* GT = GT_of[dg].data();
          const double* PH = phi_of[3 * kg + fam].data();
          const double* IRE = fam == 0 ? inv_r.data() : fam == 1 ? inv_r3.data() : inv_r5.data();
          double* RE = rad_re[u].data();
          horner_block(rc.poly.data(), rc.npoly, T2, A, len);
          for (Eigen::Index jj = 0; jj < len; ++jj) RE[jj] = PH[jj] * (E[jj] + GT[jj] * A[jj]) * IRE[jj];
          for (Eigen::Index jj : near[dg])
            RE[jj] = PH[jj] * horner(rc.series, rc.nseries, T2[jj]) * ipow(T[jj], rc.near_power) * rc.inv_delta_e;
        }
        for (std::size_t c = 0; c < nc; ++c) {
          const double* RE = rad_re[radial_of_[c]].data();
          const double* IM = im_of[3 * kgroup_[c] + family_slot(coeffs_[c].kind)].data();
          double* pr = ij_re[c].data();
          double* pi = ij_im[c].data();
          double* qr = ji_re[c].data();
          double* qi = ji_im[c].data();
          switch (coeffs_[c].kind) {
            case OperatorKind::S:
              for (Eigen::Index jj = 0; jj < len; ++jj) qr[jj] = pr[jj] = RE[jj], qi[jj] = pi[jj] = IM[jj];
              break;
            case OperatorKind::K:
              for (Eigen::Index jj = 0; jj < len; ++jj) {
                pr[jj] = RE[jj] * a[jj], pi[jj] = IM[jj] * a[jj];
                qr[jj] = -RE[jj] * b[jj], qi[jj] = -IM[jj] * b[jj];
              }
              break;
            case OperatorKind::Kt:
              for (Eigen::Index jj = 0; jj < len; ++jj) {
                pr[jj] = -RE[jj] * b[jj], pi[jj] = -IM[jj] * b[jj];
                qr[jj] = RE[jj] * a[jj], qi[jj] = IM[jj] * a[jj];
              }
              break;
            case OperatorKind::H:
              for (Eigen::Index jj = 0; jj < len; ++jj) {
                qr[jj] = pr[jj] = RE[jj] * nn[jj];
                qi[jj] = pi[jj] = IM[jj] * nn[jj];
              }
              break;
            case OperatorKind::W:
              for (Eigen::Index jj = 0; jj < len; ++jj) {
                const double g = a[jj] * b[jj];
                qr[jj] = pr[jj] = RE[jj] * g;
                qi[jj] = pi[jj] = IM[jj] * g;
              }
              break;
          }
        }
        pb.i = i;
        pb.j0 = j0;
        pb.len = len;
        block(static_cast<const PairBlock&>(pb));
      }
    }
  }

 private:
  // 0: S (1/r), 1: K, Kt, H (1/r^3), 2: W (1/r^5).
  static int family_slot(OperatorKind k) {
    return k == OperatorKind::S ? 0 : k == OperatorKind::W ? 2 : 1;
  }

  static int group_index(std::vector<double>& values, double v) {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] == v) return static_cast<int>(i);
    values.push_back(v);
    return static_cast<int>(values.size()) - 1;
  }

  // K and Kt (and any repeated context) share one radial factor.
  int radial_index(const KernelCoeffs& c) {
    auto family = [](OperatorKind k) { return k == OperatorKind::Kt ? OperatorKind::K : k; };
    for (std::size_t u = 0; u < radial_.size(); ++u) {
      const KernelCoeffs& o = radial_[u];
      if (family(o.kind) == family(c.kind) && o.p == c.p && o.k == c.k && o.delta == c.delta &&
          o.t_cut == c.t_cut && o.series == c.series && o.poly == c.poly && o.nseries == c.nseries &&
          o.npoly == c.npoly)
        return static_cast<int>(u);
    }
    radial_.push_back(c);
    return static_cast<int>(radial_.size()) - 1;
  }

  Eigen::Index n_;
  Eigen::VectorXd px_, py_, pz_, nx_, ny_, nz_;
  std::vector<KernelCoeffs> coeffs_, radial_;
  std::vector<int> radial_of_, dgroup_, kgroup_, radial_dgroup_, radial_kgroup_;
  std::vector<double> deltas_, ks_, tcut_;
};

}  // namespace erfreg::detail
