#include "erfreg/operators.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "erfreg/errors.hpp"
#include "pair_engine.hpp"

namespace erfreg {

using Complex = std::complex<double>;

bool dense_fits(Eigen::Index n) { return 16.0 * double(n) * double(n) <= kDenseByteCap; }

namespace {

OperatorMatrix assemble_terms(const std::vector<Complex>& coefs, const std::vector<KernelContext>& ctxs,
                              const CompositeQuadrature& quad) {
  const Eigen::Index n = quad.size();
  if (!dense_fits(n)) throw ResourceError("dense operator matrix above memory cap (N_Q=" + std::to_string(n) + ")");
  OperatorMatrix m;
  m.values.resize(n, n);
  const detail::PairEngine engine(quad, ctxs);
  const Eigen::VectorXd& w = quad.weights;
  const std::size_t nc = coefs.size();
  engine.run(
      [&](Eigen::Index i, const Complex* kii) {
        Complex s = 0.0;
        for (std::size_t c = 0; c < nc; ++c) s += coefs[c] * kii[c];
        m.values(i, i) = w[i] * s;
      },
      [&](const detail::PairBlock& pb) {
        Complex* col = m.values.col(pb.i).data() + pb.j0;  // entries (j, i)
        for (Eigen::Index jj = 0; jj < pb.len; ++jj) {
          Complex sij = 0.0, sji = 0.0;
          for (std::size_t c = 0; c < nc; ++c) {
            sij += coefs[c] * Complex(pb.ij_re[c][jj], pb.ij_im[c][jj]);
            sji += coefs[c] * Complex(pb.ji_re[c][jj], pb.ji_im[c][jj]);
          }
          m.values(pb.i, pb.j0 + jj) = w[pb.j0 + jj] * sij;
          col[jj] = w[pb.i] * sji;
        }
      });
  return m;
}

}  // namespace

OperatorMatrix assemble(const KernelContext& ctx, const CompositeQuadrature& quad) {
  return assemble_terms({Complex(1.0)}, {ctx}, quad);
}

OperatorMatrix assemble_combination(const std::vector<std::pair<Complex, KernelContext>>& terms,
                                    const CompositeQuadrature& quad) {
  std::vector<Complex> coefs;
  std::vector<KernelContext> ctxs;
  for (const auto& [c, ctx] : terms) {
    coefs.push_back(c);
    ctxs.push_back(ctx);
  }
  return assemble_terms(coefs, ctxs, quad);
}

OperatorMatrix hypersingular(const KernelContext& ctx_h, const KernelContext& ctx_w, const CompositeQuadrature& quad) {
  if (ctx_h.op.kind != OperatorKind::H || ctx_w.op.kind != OperatorKind::W)
    throw std::invalid_argument("hypersingular needs an H and a W context");
  if (ctx_h.k != ctx_w.k || ctx_h.delta != ctx_w.delta)
    throw std::invalid_argument("hypersingular: contexts differ in k or delta");
  return assemble_terms({Complex(1.0), Complex(1.0)}, {ctx_h, ctx_w}, quad);
}

Eigen::VectorXcd apply(const OperatorMatrix& matrix, const Eigen::VectorXcd& density) {
  if (density.size() != matrix.size()) throw std::invalid_argument("apply: density length mismatch");
  Eigen::VectorXcd out = matrix.values * density;
  if (matrix.identity_coeff != Complex(0.0)) out += matrix.identity_coeff * density;
  return out;
}

std::vector<Eigen::VectorXcd> apply_matrix_free(const std::vector<KernelContext>& ctxs,
                                                const CompositeQuadrature& quad, const Eigen::VectorXcd& density) {
  const Eigen::Index n = quad.size();
  if (density.size() != n) throw std::invalid_argument("apply_matrix_free: density length mismatch");
  const detail::PairEngine engine(quad, ctxs);
  const std::size_t nc = ctxs.size();
  const Eigen::VectorXcd psi = quad.weights.cast<Complex>().cwiseProduct(density);
  std::vector<Eigen::VectorXd> out_re(nc, Eigen::VectorXd::Zero(n)), out_im(nc, Eigen::VectorXd::Zero(n));
  const Eigen::VectorXd psi_re = psi.real(), psi_im = psi.imag();
  engine.run(
      [&](Eigen::Index i, const Complex* kii) {
        for (std::size_t c = 0; c < nc; ++c) {
          const Complex v = kii[c] * psi[i];
          out_re[c][i] += v.real();
          out_im[c][i] += v.imag();
        }
      },
      [&](const detail::PairBlock& pb) {
        using Map = Eigen::Map<const Eigen::VectorXd>;
        const double ur = psi_re[pb.i], ui = psi_im[pb.i];
        const Map vr(psi_re.data() + pb.j0, pb.len), vi(psi_im.data() + pb.j0, pb.len);
        for (std::size_t c = 0; c < nc; ++c) {
          const Map ar(pb.ij_re[c], pb.len), ai(pb.ij_im[c], pb.len);
          const Map br(pb.ji_re[c], pb.len), bi(pb.ji_im[c], pb.len);
          out_re[c][pb.i] += ar.dot(vr) - ai.dot(vi);
          out_im[c][pb.i] += ar.dot(vi) + ai.dot(vr);
          out_re[c].segment(pb.j0, pb.len) += ur * br - ui * bi;
          out_im[c].segment(pb.j0, pb.len) += ui * br + ur * bi;
        }
      });
  std::vector<Eigen::VectorXcd> result(nc, Eigen::VectorXcd(n));
  for (std::size_t c = 0; c < nc; ++c) {
    result[c].real() = out_re[c];
    result[c].imag() = out_im[c];
  }
  return result;
}

LinearOperator as_linear_operator(const OperatorMatrix& matrix) {
  auto shared = std::make_shared<const OperatorMatrix>(matrix);
  return LinearOperator(matrix.size(), [shared](const Eigen::VectorXcd& v) { return apply(*shared, v); });
}

LinearOperator matrix_free_operator(const std::vector<std::pair<Complex, KernelContext>>& terms,
                                    Complex identity_coeff, const CompositeQuadrature& quad) {
  std::vector<Complex> coefs;
  std::vector<KernelContext> ctxs;
  for (const auto& [c, ctx] : terms) {
    coefs.push_back(c);
    ctxs.push_back(ctx);
  }
  auto q = std::make_shared<const CompositeQuadrature>(quad);
  return LinearOperator(quad.size(), [coefs, ctxs, q, identity_coeff](const Eigen::VectorXcd& v) {
    const std::vector<Eigen::VectorXcd> parts = apply_matrix_free(ctxs, *q, v);
    Eigen::VectorXcd out = identity_coeff * v;
    for (std::size_t c = 0; c < coefs.size(); ++c) out += coefs[c] * parts[c];
    return out;
  });
}

namespace {

static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated operator dump");
  return v;
}

}  // namespace

void write_operator_binary(const OperatorMatrix& matrix, const std::string& path, unsigned flags) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write("HREG", 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(matrix.size()));
  put<std::uint32_t>(out, flags);
  put<std::uint32_t>(out, 0u);
  const bool wide = flags & kDumpFloat64;
  for (Eigen::Index i = 0; i < matrix.size(); ++i)
    for (Eigen::Index j = 0; j < matrix.size(); ++j) {
      const Complex v = matrix.values(i, j);
      if (wide) {
        put<double>(out, v.real());
        put<double>(out, v.imag());
      } else {
        put<float>(out, static_cast<float>(v.real()));
        put<float>(out, static_cast<float>(v.imag()));
      }
    }
}

OperatorMatrix read_operator_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "HREG", 4) != 0) throw std::runtime_error("not an operator dump: " + path);
  const auto n = get<std::uint32_t>(in);
  const auto flags = get<std::uint32_t>(in);
  get<std::uint32_t>(in);
  if (!dense_fits(n)) throw ResourceError("operator dump above memory cap");
  OperatorMatrix m;
  m.values.resize(n, n);
  const bool wide = flags & kDumpFloat64;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (wide) {
        const double re = get<double>(in), im = get<double>(in);
        m.values(i, j) = Complex(re, im);
      } else {
        const float re = get<float>(in), im = get<float>(in);
        m.values(i, j) = Complex(re, im);
      }
    }
  return m;
}

}  // namespace erfreg
