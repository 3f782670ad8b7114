#include "infocouple/mecb.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <vector>

#include "infocouple/ebim.hpp"
#include "infocouple/errors.hpp"

namespace infocouple::mecb {

EncoderMethod parse_encoder(std::string_view name) {
  if (name == "alg1") return EncoderMethod::alg1;
  if (name == "uniform") return EncoderMethod::uniform;
  if (name == "greedy-fill") return EncoderMethod::greedy_fill;
  if (name == "brute") return EncoderMethod::brute;
  throw DomainError("unknown encoder '" + std::string(name) + "' (expected alg1|uniform|greedy-fill|brute)");
}

std::string_view to_string(EncoderMethod method) {
  switch (method) {
    case EncoderMethod::alg1:
      return "alg1";
    case EncoderMethod::uniform:
      return "uniform";
    case EncoderMethod::greedy_fill:
      return "greedy-fill";
    case EncoderMethod::brute:
      return "brute";
  }
  return "unknown";
}

Coupling encode(const Distribution& p_x, Bits rate, EncoderMethod method) {
  switch (method) {
    case EncoderMethod::alg1:
      return ebim::solve_deterministic(p_x, rate);
    case EncoderMethod::uniform:
      return ebim::uniform_quantizer(p_x, rate);
    case EncoderMethod::greedy_fill: {
      if (!(rate >= 0.0)) throw DomainError("rate must be >= 0");
      const double codes = std::floor(std::exp2(std::min(rate, 62.0)) + 1e-9);
      return ebim::greedy_fill_encoder(p_x, static_cast<std::size_t>(codes));
    }
    case EncoderMethod::brute:
      return ebim::brute_force_deterministic(p_x, rate).coupling;
  }
  throw DomainError("unknown encoder");
}

PipelineResult pipeline(const Distribution& p_x, const Distribution& p_y, Bits rate, EncoderMethod encoder,
                        mec::Method decoder) {
  Coupling p_xt = encode(p_x, rate, encoder);
  const Distribution p_t = p_xt.col_marginal();
  Coupling p_ty = mec::couple(p_t, p_y, decoder);
  Coupling p_xy = compose_chain(p_xt, p_ty);
  const Bits i_xt = mutual_information(p_xt);
  const Bits i_ty = mutual_information(p_ty);
  const Bits i_xy = mutual_information(p_xy);
  const Bits h_t = entropy(p_t);
  return PipelineResult{std::move(p_xt), std::move(p_ty), std::move(p_xy), i_xt, i_ty, i_xy,
                        rate, h_t, i_xt + i_ty - rate, i_xt + i_ty - h_t};
}

namespace {

// q(y | t) as a dense table; rows of zero-mass codes stay zero.
std::vector<double> decoder_conditionals(const Coupling& p_xt, const Coupling& p_ty) {
  if (p_xt.cols() != p_ty.rows()) {
    throw CompositionError("compose_chain: encoder has " + std::to_string(p_xt.cols()) + " codes, decoder has " +
                           std::to_string(p_ty.rows()));
  }
  const Distribution enc_t = p_xt.col_marginal();
  const Distribution dec_t = p_ty.row_marginal();
  for (std::size_t t = 0; t < enc_t.size(); ++t) {
    if (std::abs(enc_t[t] - dec_t[t]) > kSumTolerance) {
      throw CompositionError("compose_chain: code marginals differ at t=" + std::to_string(t));
    }
  }
  std::vector<double> cond(p_ty.rows() * p_ty.cols(), 0.0);
  for (std::size_t t = 0; t < p_ty.rows(); ++t) {
    if (!(dec_t[t] > 0.0)) continue;
    for (std::size_t y = 0; y < p_ty.cols(); ++y) cond[t * p_ty.cols() + y] = p_ty(t, y) / dec_t[t];
  }
  return cond;
}

}  // namespace

Coupling compose_chain(const Coupling& p_xt, const Coupling& p_ty) {
  const std::vector<double> cond = decoder_conditionals(p_xt, p_ty);
  const std::size_t nx = p_xt.rows();
  const std::size_t nt = p_xt.cols();
  const std::size_t ny = p_ty.cols();
  std::vector<double> cells(nx * ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t t = 0; t < nt; ++t) {
      const double w = p_xt(x, t);
      if (w == 0.0) continue;
      for (std::size_t y = 0; y < ny; ++y) cells[x * ny + y] += w * cond[t * ny + y];
    }
  return Coupling(nx, ny, std::move(cells));
}

ChainInformation lemma1_audit(const Coupling& p_xt, const Coupling& p_ty) {
  const std::vector<double> cond = decoder_conditionals(p_xt, p_ty);
  const std::size_t nx = p_xt.rows();
  const std::size_t nt = p_xt.cols();
  const std::size_t ny = p_ty.cols();

  std::vector<double> xty(nx * nt * ny, 0.0);
  std::vector<double> xt(nx * nt, 0.0), ty(nt * ny, 0.0), xy(nx * ny, 0.0);
  std::vector<double> px(nx, 0.0), pt(nt, 0.0), py(ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t t = 0; t < nt; ++t)
      for (std::size_t y = 0; y < ny; ++y) {
        const double v = p_xt(x, t) * cond[t * ny + y];
        xty[(x * nt + t) * ny + y] = v;
        xt[x * nt + t] += v;
        ty[t * ny + y] += v;
        xy[x * ny + y] += v;
        px[x] += v;
        pt[t] += v;
        py[y] += v;
      }
  const double h_x = entropy_bits(px), h_t = entropy_bits(pt), h_y = entropy_bits(py);
  const double h_xt = entropy_bits(xt), h_ty = entropy_bits(ty), h_xy = entropy_bits(xy);
  const double h_xty = entropy_bits(xty);
  return ChainInformation{h_x + h_y - h_xy, h_x + h_t - h_xt, h_t + h_y - h_ty, h_t + h_xy - h_xty};
}

void export_coupling_grid(std::span<const PipelineResult> results, const std::filesystem::path& path,
                          const std::string& comment) {
  if (results.empty()) throw DomainError("export_coupling_grid: no results");
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "compression_rate,x,y,mass\n";
  char buf[64];
  for (const PipelineResult& r : results) {
    const double h_x = entropy(r.end_to_end.row_marginal());
    const double compression = r.rate > 0.0 ? h_x / r.rate : std::numeric_limits<double>::infinity();
    const Coupling& c = r.end_to_end;
    for (std::size_t x = 0; x < c.rows(); ++x)
      for (std::size_t y = 0; y < c.cols(); ++y) {
        if (c(x, y) <= 0.0) continue;
        std::snprintf(buf, sizeof buf, "%.12g", compression);
        out << buf << ',' << x << ',' << y << ',';
        std::snprintf(buf, sizeof buf, "%.12g", c(x, y));
        out << buf << '\n';
      }
  }
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace infocouple::mecb
