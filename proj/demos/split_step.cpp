// Split-step walk at (π/8, −π/4): bulk indices, decay roots and the boundary
// modes of the walk cut with the coin −iσ₂.
#include <cstdio>

#include "walkindex/walkindex.hpp"

using namespace walkindex;

int main() {
  const SplitStepParams p{kPi / 8, -kPi / 4};
  const auto m = split_step(p);
  const Symbol w(m.walk);

  const auto r = index_chiral_report(w, m.rep);
  std::printf("gap            %.6f\n", gap_min(w, 513));
  std::printf("ind            %lld\n", index_ind(w));
  std::printf("six (BDI)      %lld, sign det B(0) %+d, sign det B(pi) %+d\n", r.value.value(), *r.sign_c0, *r.sign_cpi);

  for (int s : {1, -1})
    for (const auto& d : decay_roots(m.walk, s))
      std::printf("decay root     s=%+d  lambda = %.10f %+.2ei\n", s, d.lambda.real(), d.lambda.imag());

  const auto f = split_step_decoupled(p, -kI * pauli::y(), 64);
  std::printf("\nboundary modes on 64 cells\n");
  for (const auto& b : boundary_modes(f, m.rep))
    std::printf("  s=%+d  %-5s  chirality %+.0f  fitted %.8f  predicted %.8f\n", b.s,
                std::string(to_string(b.side)).c_str(), b.chirality, b.fitted_lambda, predict_decay(m.walk, b.s));
  std::printf("six from the boundary  %lld\n", six_oracle(f, m.rep).value());
}
