#include "pil/fourier.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pil/incidence.hpp"

namespace pil {
namespace {

std::vector<Complex> twiddles(Residue q) {
  std::vector<Complex> w(q);
  for (Residue j = 0; j < q; ++j) {
    w[j] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(q));
  }
  return w;
}

void require_same(const GridFunction& f, const GridFunction& g) {
  if (!(f.ambient() == g.ambient())) throw std::invalid_argument("grid functions on different ambients");
}

Residue neg(Residue x, Residue q) { return x == 0 ? 0 : q - x; }

}  // namespace

GridFunction::GridFunction(const Ambient& amb) : amb_(amb), side_(amb.top_modulus()) {
  if (side_ * side_ > kMaxPoints) throw std::invalid_argument("grid too large for a dense function");
  values_.assign(side_ * side_, Complex(0.0, 0.0));
}

GridFunction cube_indicator(const CubeSet& P) {
  const Ambient& amb = P.ambient();
  GridFunction f(amb);
  const Residue q = f.side();
  const Residue step = amb.modulus(P.level());
  for (const auto& e : P.entries()) {
    const double v = e.weight.to_double() * static_cast<double>(e.multiplicity);
    for (Residue x = e.cell.x; x < q; x += step) {
      for (Residue y = e.cell.y; y < q; y += step) f.at(x, y) += v;
    }
  }
  return f;
}

GridFunction tube_indicator(const TubeSet& T) {
  const Ambient& amb = T.ambient();
  GridFunction g(amb);
  const Residue q = g.side();
  const Residue step = amb.modulus(T.level());
  for (const auto& e : T.entries()) {
    const double v = static_cast<double>(e.multiplicity);
    for (Residue x = 0; x < q; ++x) {
      const Residue y0 = amb.add(amb.mul(e.cell.a, x, T.level()), e.cell.b, T.level());
      for (Residue y = y0; y < q; y += step) g.at(x, y) += v;
    }
  }
  return g;
}

GridFunction dft_forward(const GridFunction& f) {
  const Residue q = f.side();
  const auto w = twiddles(q);
  GridFunction mid(f.ambient());
  std::vector<Complex> row(q);
  // Transform along y for each fixed x.
  for (Residue x = 0; x < q; ++x) {
    for (Residue xi = 0; xi < q; ++xi) {
      Complex acc(0.0, 0.0);
      for (Residue y = 0; y < q; ++y) acc += f.at(x, y) * w[(xi * y) % q];
      mid.at(x, xi) = acc;
    }
  }
  GridFunction out(f.ambient());
  const double scale = 1.0 / static_cast<double>(q);
  // Then along x for each fixed second frequency.
  for (Residue xi2 = 0; xi2 < q; ++xi2) {
    for (Residue x = 0; x < q; ++x) row[x] = mid.at(x, xi2);
    for (Residue xi1 = 0; xi1 < q; ++xi1) {
      Complex acc(0.0, 0.0);
      for (Residue x = 0; x < q; ++x) acc += row[x] * w[(xi1 * x) % q];
      out.at(xi1, xi2) = acc * scale;
    }
  }
  return out;
}

ParsevalReport check_parseval(const GridFunction& f, const GridFunction& g) {
  require_same(f, g);
  const GridFunction fh = dft_forward(f);
  const GridFunction gh = dft_forward(g);
  Complex space(0.0, 0.0), freq(0.0, 0.0);
  double self_space = 0.0, self_freq = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    space += f.values()[i] * std::conj(g.values()[i]);
    freq += fh.values()[i] * std::conj(gh.values()[i]);
    self_space += std::norm(f.values()[i]);
    self_freq += std::norm(fh.values()[i]);
  }
  return ParsevalReport{std::abs(space - freq), std::abs(self_space - self_freq)};
}

GridFunction convolve(const GridFunction& f, const GridFunction& g) {
  require_same(f, g);
  const Residue q = f.side();
  GridFunction out(f.ambient());
  for (Residue y1 = 0; y1 < q; ++y1) {
    for (Residue y2 = 0; y2 < q; ++y2) {
      const Complex fy = f.at(y1, y2);
      if (fy == Complex(0.0, 0.0)) continue;
      for (Residue x1 = 0; x1 < q; ++x1) {
        const Residue d1 = (x1 + q - y1) % q;
        for (Residue x2 = 0; x2 < q; ++x2) out.at(x1, x2) += fy * g.at(d1, (x2 + q - y2) % q);
      }
    }
  }
  return out;
}

double convolution_spectral_deviation(const GridFunction& f, const GridFunction& g) {
  const GridFunction ch = dft_forward(convolve(f, g));
  const GridFunction fh = dft_forward(f);
  const GridFunction gh = dft_forward(g);
  const double q = static_cast<double>(f.side());
  double dev = 0.0;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    dev = std::max(dev, std::abs(ch.values()[i] - q * fh.values()[i] * gh.values()[i]));
  }
  return dev;
}

double reflection_deviation(const GridFunction& f) {
  const GridFunction ff = dft_forward(dft_forward(f));
  const Residue q = f.side();
  double dev = 0.0;
  for (Residue x = 0; x < q; ++x) {
    for (Residue y = 0; y < q; ++y) dev = std::max(dev, std::abs(ff.at(x, y) - f.at(neg(x, q), neg(y, q))));
  }
  return dev;
}

double off_line_spectral_mass(const GridFunction& f, Residue slope) {
  const GridFunction fh = dft_forward(f);
  const Residue q = f.side();
  double worst = 0.0;
  for (Residue xi1 = 0; xi1 < q; ++xi1) {
    for (Residue xi2 = 0; xi2 < q; ++xi2) {
      if ((xi1 + (slope % q) * xi2) % q == 0) continue;
      worst = std::max(worst, std::abs(fh.at(xi1, xi2)));
    }
  }
  return worst;
}

bool HighLowReport::identity_ok(double tol) const {
  const double i = I_exact.to_double();
  return std::abs(i - (L + H)) <= tol * std::max(1.0, i);
}

bool HighLowReport::low_ok(double tol) const {
  return std::abs(L - low_exact.to_double()) <= tol * std::max(1.0, std::abs(L));
}

bool HighLowReport::high_ok(double tol) const { return H <= high_bound + tol; }

bool HighLowReport::inequality_ok(double tol) const { return lhs <= rhs + tol * std::max(1.0, lhs); }

std::string HighLowReport::csv_header() { return "k,I,L,H,low_exact,high_bound,lhs,rhs"; }

std::string HighLowReport::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << k << "," << I_exact.to_string() << "," << L << "," << H << "," << low_exact.to_string() << ","
     << high_bound << "," << lhs << "," << rhs;
  return os.str();
}

namespace {

std::vector<HighLowReport> split(const CubeSet& P, const TubeSet& T, unsigned k_lo, unsigned k_hi) {
  if (!(P.ambient() == T.ambient())) throw std::invalid_argument("ambient mismatch");
  const Ambient& amb = P.ambient();
  const unsigned n = amb.n();
  if (P.level() != n || T.level() != n) throw std::invalid_argument("high/low split needs top-level cubes and tubes");
  if (k_lo < 1 || k_hi > n - 1 || k_lo > k_hi) throw std::invalid_argument("cutoff k must lie in [1, n-1]");

  const GridFunction f = cube_indicator(P);
  const GridFunction g = tube_indicator(T);
  const GridFunction fh = dft_forward(f);
  const GridFunction gh = dft_forward(g);
  const Residue q = f.side();

  double total = 0.0, f_sq = 0.0;
  for (std::size_t i = 0; i < fh.size(); ++i) {
    total += (fh.values()[i] * std::conj(gh.values()[i])).real();
    f_sq += std::norm(f.values()[i]);
  }
  double t_sq = 0.0;
  for (const auto& e : T.entries()) t_sq += static_cast<double>(e.multiplicity) * static_cast<double>(e.multiplicity);
  const Rational I = incidence_count(P, T);

  std::vector<HighLowReport> out;
  for (unsigned k = k_lo; k <= k_hi; ++k) {
    const Residue step = amb.modulus(k);
    double low = 0.0;
    for (Residue xi1 = 0; xi1 < q; xi1 += step) {
      for (Residue xi2 = 0; xi2 < q; xi2 += step) low += (fh.at(xi1, xi2) * std::conj(gh.at(xi1, xi2))).real();
    }
    HighLowReport r;
    r.k = k;
    r.I_exact = I;
    r.L = low;
    r.H = total - low;
    r.low_exact = incidence_count(P, thicken_tubes(T, k)) / Rational(static_cast<std::int64_t>(step));
    r.high_bound = std::pow(static_cast<double>(amb.p()), (static_cast<double>(n) + k - 1.0) / 2.0) *
                   std::sqrt(t_sq) * std::sqrt(f_sq);
    r.lhs = I.to_double();
    r.rhs = r.high_bound + r.low_exact.to_double();
    out.push_back(r);
  }
  return out;
}

}  // namespace

HighLowReport highlow_split(const CubeSet& P, const TubeSet& T, unsigned k) { return split(P, T, k, k).front(); }

std::vector<HighLowReport> highlow_split_all(const CubeSet& P, const TubeSet& T) {
  const unsigned n = P.ambient().n();
  if (n < 2) throw std::invalid_argument("high/low split needs n >= 2");
  return split(P, T, 1, n - 1);
}

}  // namespace pil
