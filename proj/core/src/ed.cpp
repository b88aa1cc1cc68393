#include <bit>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "umps/models.hpp"

namespace umps {

namespace {

// H psi for the periodic chain; bit n set means site n is spin down.
void apply_xxz(const std::vector<cplx>& in, std::vector<cplx>& out, std::size_t length, double delta) {
  const std::size_t dim = in.size();
  for (std::size_t s = 0; s < dim; ++s) out[s] = 0.0;
  for (std::size_t s = 0; s < dim; ++s) {
    const cplx amp = in[s];
    if (amp == cplx(0.0)) continue;
    double diag = 0.0;
    for (std::size_t n = 0; n < length; ++n) {
      const std::size_t m = (n + 1) % length;
      const bool a = (s >> n) & 1u, b = (s >> m) & 1u;
      if (a == b) {
        diag += delta / 4;
      } else {
        diag -= delta / 4;
        out[s ^ ((std::size_t{1} << n) | (std::size_t{1} << m))] += 0.5 * amp;
      }
    }
    out[s] += diag * amp;
  }
}

double norm2(const std::vector<cplx>& v) {
  double acc = 0.0;
  for (const auto& z : v) acc += std::norm(z);
  return acc;
}

}  // namespace

EdTrace ed_evolve(std::size_t length, double delta, double t_max, double sample_dt, double dt_exact) {
  if (length < 2 || length > 20 || length % 2 != 0) throw std::invalid_argument("ed_evolve: length must be even, 2..20");
  if (!(sample_dt > 0.0) || !(dt_exact > 0.0) || t_max < 0.0) throw std::invalid_argument("ed_evolve: bad times");
  const std::size_t dim = std::size_t{1} << length;
  std::vector<cplx> psi(dim, 0.0), term(dim), next(dim);
  std::size_t neel = 0;
  for (std::size_t n = 1; n < length; n += 2) neel |= std::size_t{1} << n;
  psi[neel] = 1.0;

  const auto observe = [&](EdTrace& tr, double t) {
    double down0 = 0.0, sz = 0.0;
    for (std::size_t s = 0; s < dim; ++s) {
      const double p = std::norm(psi[s]);
      if (s & 1u) down0 += p;
      sz += p * (static_cast<double>(length) - 2.0 * std::popcount(s)) / 2.0;
    }
    tr.times.push_back(t);
    tr.offset.push_back(down0);
    tr.sz_drift = std::max(tr.sz_drift, std::abs(sz));
  };

  const auto samples = static_cast<std::size_t>(std::llround(t_max / sample_dt));
  const auto sub = static_cast<std::size_t>(std::ceil(sample_dt / dt_exact - 1e-9));
  const double h = sample_dt / static_cast<double>(sub);
  EdTrace tr;
  observe(tr, 0.0);
  for (std::size_t k = 1; k <= samples; ++k) {
    for (std::size_t j = 0; j < sub; ++j) {
      term = psi;
      for (int order = 1; order < 80; ++order) {
        apply_xxz(term, next, length, delta);
        const cplx f(0.0, -h / order);
        for (std::size_t s = 0; s < dim; ++s) {
          term[s] = f * next[s];
          psi[s] += term[s];
        }
        if (norm2(term) < 1e-34) break;
      }
    }
    observe(tr, static_cast<double>(k) * sample_dt);
  }
  return tr;
}

}  // namespace umps
