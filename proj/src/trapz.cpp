#include "ctrap/trapz.hpp"

namespace ctrap {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

double trap_rect(const RectGridFn& f, int order, std::optional<Puncture> puncture) {
  if (order != 2 && order != 4 && order != 6) throw QuadratureError("trapezoid order must be 2, 4 or 6");
  if (f.values.size() != static_cast<std::size_t>(f.n + 1) * (f.m + 1))
    throw QuadratureError("sample array does not match the lattice");
  if (order >= 4 && !f.edges) throw QuadratureError("order >= 4 needs boundary derivatives");
  if (order == 6 && !f.edges->has_third) throw QuadratureError("order 6 needs third boundary derivatives");
  if (puncture && (puncture->j < 0 || puncture->j > f.n || puncture->k < 0 || puncture->k > f.m))
    throw QuadratureError("puncture outside the lattice");

  const double ha = f.dalpha(), hb = f.dbeta();
  std::vector<double> terms;
  terms.reserve(f.values.size());
  for (int k = 0; k <= f.m; ++k)
    for (int j = 0; j <= f.n; ++j) {
      if (puncture && puncture->j == j && puncture->k == k) continue;
      terms.push_back(trap_weight(j, k, f.n, f.m) * f.at(j, k));
    }
  double total = ha * hb * pairwise_sum(terms);
  if (order == 2) return total;

  const EdgeDerivatives& e = *f.edges;
  auto wsum = [](const std::vector<double>& hi, const std::vector<double>& lo) {
    const int last = static_cast<int>(hi.size()) - 1;
    double s = 0.0;
    for (int i = 0; i <= last; ++i) s += ((i == 0 || i == last) ? 0.5 : 1.0) * (hi[i] - lo[i]);
    return s;
  };
  total -= hb * ha * ha / 12.0 * wsum(e.fa_hi, e.fa_lo);
  total -= ha * hb * hb / 12.0 * wsum(e.fb_hi, e.fb_lo);
  if (order == 4) return total;

  total += hb * ha * ha * ha * ha / 720.0 * wsum(e.faaa_hi, e.faaa_lo);
  total += ha * hb * hb * hb * hb / 720.0 * wsum(e.fbbb_hi, e.fbbb_lo);
  // corners (a,c), (b,c), (a,d), (b,d)
  auto corner = [](const std::array<double, 4>& v) { return v[3] - v[2] - v[1] + v[0]; };
  const double a2 = ha * ha / 12.0, b2 = hb * hb / 12.0;
  const double a4 = -ha * ha * ha * ha / 720.0, b4 = -hb * hb * hb * hb / 720.0;
  total += a2 * b2 * corner(e.fab);
  total += a2 * b4 * corner(e.fabbb);
  total += a4 * b2 * corner(e.faaab);
  total += a4 * b4 * corner(e.faaabbb);
  return total;
}

}  // namespace ctrap
