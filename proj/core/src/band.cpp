#include "band.hpp"

#include "chaos_ns/spectral_ops.hpp"

namespace chaos_ns::detail {

namespace {
constexpr Complex kI{0.0, 1.0};
}

PhysicalVector physical_of(const SpectralField& f) {
  const Grid& g = f.grid();
  PhysicalVector out{Plane(g.physical_size()), Plane(g.physical_size())};
  std::vector<Complex> scratch(g.spectral_size());
  for (int l = 0; l < Grid::kDim; ++l) {
    std::copy(f.component(l).begin(), f.component(l).end(), scratch.begin());
    band_filter(g, scratch);
    g.inverse(scratch, out[static_cast<std::size_t>(l)]);
  }
  return out;
}

void physical_gradient(const SpectralField& f, PhysicalGradient& out, std::vector<Complex>& scratch) {
  const Grid& g = f.grid();
  scratch.resize(g.spectral_size());
  for (int l = 0; l < Grid::kDim; ++l) {
    const auto comp = f.component(l);
    for (int j = 0; j < Grid::kDim; ++j) {
      auto& plane = out[static_cast<std::size_t>(2 * l + j)];
      plane.resize(g.physical_size());
      for (int row = 0; row < g.n(); ++row) {
        const int kx = g.wave_index(row);
        for (int col = 0; col < g.half(); ++col) {
          const std::size_t i = g.index(row, col);
          const double k = g.odd_wavenumber(j == 0 ? kx : col);
          scratch[i] = in_band(g, kx, col) ? kI * k * comp[i] : Complex{};
        }
      }
      g.inverse(scratch, plane);
    }
  }
}

void accumulate_advection(const PhysicalVector& v, const PhysicalGradient& d, double s, PhysicalVector& acc) {
  const std::size_t np = v[0].size();
  for (std::size_t i = 0; i < np; ++i) {
    acc[0][i] += s * (v[0][i] * d[0][i] + v[1][i] * d[1][i]);
    acc[1][i] += s * (v[0][i] * d[2][i] + v[1][i] * d[3][i]);
  }
}

SpectralField project_physical(const Grid& g, const PhysicalVector& acc) {
  SpectralField out(g);
  for (int l = 0; l < Grid::kDim; ++l) {
    g.forward(acc[static_cast<std::size_t>(l)], out.component(l));
    band_filter(g, out.component(l));
  }
  leray_project_inplace(g, out.component(0), out.component(1));
  out.set_divergence_free(true);
  return out;
}

bool sparse_of(const SpectralField& f, std::size_t max_terms, SparseVectorField& out) {
  const Grid& g = f.grid();
  out.terms.clear();
  for (int row = 0; row < g.n(); ++row) {
    const int kx = g.wave_index(row);
    for (int col = 0; col < g.half(); ++col) {
      const std::size_t i = g.index(row, col);
      const Complex a = f.component(0)[i];
      const Complex b = f.component(1)[i];
      if (a == Complex{} && b == Complex{}) continue;
      if (!in_band(g, kx, col)) continue;
      out.terms.push_back({{kx, col}, {a, b}});
      // The conjugate partner is stored implicitly unless the column is self-conjugate.
      if (col != 0) out.terms.push_back({{-kx, -col}, {std::conj(a), std::conj(b)}});
      if (out.terms.size() > max_terms) return false;
    }
  }
  return true;
}

SparseVectorField combine(std::span<const SparseVectorField> fields, std::span<const double> weights) {
  SparseVectorField out;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    if (weights[f] == 0.0) continue;
    for (const auto& t : fields[f].terms) {
      auto it = std::find_if(out.terms.begin(), out.terms.end(), [&](const auto& o) { return o.wave == t.wave; });
      if (it == out.terms.end()) {
        out.terms.push_back({t.wave, {weights[f] * t.coeff[0], weights[f] * t.coeff[1]}});
      } else {
        it->coeff[0] += weights[f] * t.coeff[0];
        it->coeff[1] += weights[f] * t.coeff[1];
      }
    }
  }
  return out;
}

SpectralField sparse_transport(const SparseVectorField& s, const SpectralField& w) {
  const Grid& g = w.grid();
  const int lim = g.dealias_limit();
  SpectralField out(g);
  const auto fetch = [&](int rx, int ry, int l) -> Complex {
    if (ry >= 0) return w.component(l)[g.index(g.row_of(rx), ry)];
    return std::conj(w.component(l)[g.index(g.row_of(-rx), -ry)]);
  };
  for (int row = 0; row < g.n(); ++row) {
    const int qx = g.wave_index(row);
    if (std::abs(qx) > lim) continue;
    for (int qy = 0; qy <= lim; ++qy) {
      Complex y0{}, y1{};
      for (const auto& t : s.terms) {
        const int rx = qx - t.wave[0];
        const int ry = qy - t.wave[1];
        if (std::abs(rx) > lim || std::abs(ry) > lim) continue;
        const Complex adv = kI * (t.coeff[0] * g.odd_wavenumber(rx) + t.coeff[1] * g.odd_wavenumber(ry));
        y0 += adv * fetch(rx, ry, 0);
        y1 += adv * fetch(rx, ry, 1);
      }
      const std::size_t i = g.index(row, qy);
      out.component(0)[i] = y0;
      out.component(1)[i] = y1;
    }
  }
  leray_project_inplace(g, out.component(0), out.component(1));
  out.set_divergence_free(true);
  return out;
}

}  // namespace chaos_ns::detail
