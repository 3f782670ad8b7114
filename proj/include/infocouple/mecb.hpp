#pragma once

// Two-stage coupling through a rate-limited code: X -> T -> Y.
// The encoder solves the entropy-bounded problem on p_X, the decoder is a
// minimum-entropy coupling between the resulting code marginal and p_Y.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "infocouple/mec.hpp"
#include "infocouple/probdist.hpp"

namespace infocouple::mecb {

enum class EncoderMethod { alg1, uniform, greedy_fill, brute };

EncoderMethod parse_encoder(std::string_view name);
std::string_view to_string(EncoderMethod method);

// Encoder coupling p_XT for the given budget. greedy_fill uses floor(2^R) codes.
Coupling encode(const Distribution& p_x, Bits rate, EncoderMethod method);

struct PipelineResult {
  Coupling encoder;     // p_XT
  Coupling decoder;     // p_TY
  Coupling end_to_end;  // p_XY
  Bits i_xt;
  Bits i_ty;
  Bits i_xy;
  Bits rate;                   // budget R
  Bits code_entropy;           // achieved H(T)
  Bits lower_bound;            // i_xt + i_ty - R
  Bits lower_bound_achieved;   // i_xt + i_ty - H(T)
};

PipelineResult pipeline(const Distribution& p_x, const Distribution& p_y, Bits rate,
                        EncoderMethod encoder = EncoderMethod::alg1,
                        mec::Method decoder = mec::Method::max_seeking);

// p_XY(x, y) = sum_t p_XT(x, t) q(y | t). Code symbols with zero decoder mass
// contribute nothing. Throws CompositionError when the shared code marginals
// differ by more than 1e-9.
Coupling compose_chain(const Coupling& p_xt, const Coupling& p_ty);

struct ChainInformation {
  Bits i_xy;
  Bits i_xt;
  Bits i_ty;
  Bits i_t_xy;  // I(T; X, Y)
  // I(X;Y) - I(X;T) - I(Y;T) + I(T;X,Y); zero up to rounding.
  Bits residual() const { return i_xy - i_xt - i_ty + i_t_xy; }
};

// All four informations of the chain, read off the full joint p(x, t, y).
ChainInformation lemma1_audit(const Coupling& p_xt, const Coupling& p_ty);

// CSV `compression_rate,x,y,mass`, one row per nonzero end-to-end cell, with
// compression rate H(X)/R. `comment` (if nonempty) is written first as `# ...`.
void export_coupling_grid(std::span<const PipelineResult> results, const std::filesystem::path& path,
                          const std::string& comment = {});

}  // namespace infocouple::mecb
