#include "abq/transform.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

namespace abq {
namespace {

// fftw_malloc'd storage. Every execute call runs on buffers from the same
// allocator as the planning buffers, so FFTW picks identical codelets.
template <typename T>
class FftwBuffer {
 public:
  explicit FftwBuffer(std::size_t n)
      : n_(n), data_(static_cast<T*>(fftw_malloc(sizeof(T) * (n ? n : 1)))) {
    if (data_ == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data_); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  T* data() { return data_; }
  std::size_t size() const { return n_; }
  T& operator[](std::size_t i) { return data_[i]; }

 private:
  std::size_t n_;
  T* data_;
};

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// The FFTW planner is not thread safe; executing an existing plan on new
// arrays is. Plans live for the life of the process.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  PlanPair get(int n0, int n1) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(n0, n1);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t real_n = static_cast<std::size_t>(n0 > 0 ? n0 : 1) * n1;
    const std::size_t half_n = static_cast<std::size_t>(n0 > 0 ? n0 : 1) * (n1 / 2 + 1);
    FftwBuffer<double> r(real_n);
    FftwBuffer<fftw_complex> c(half_n);
    PlanPair p;
    if (n0 > 0) {
      p.forward = fftw_plan_dft_r2c_2d(n0, n1, r.data(), c.data(), FFTW_ESTIMATE);
      p.backward = fftw_plan_dft_c2r_2d(n0, n1, c.data(), r.data(), FFTW_ESTIMATE);
    } else {
      p.forward = fftw_plan_dft_r2c_1d(n1, r.data(), c.data(), FFTW_ESTIMATE);
      p.backward = fftw_plan_dft_c2r_1d(n1, c.data(), r.data(), FFTW_ESTIMATE);
    }
    if (p.forward == nullptr || p.backward == nullptr) {
      throw std::runtime_error("fftw: plan creation failed");
    }
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, PlanPair> plans_;
};

Complex to_complex(const fftw_complex& c) { return {c[0], c[1]}; }

// Half spectrum of size n0 x (n1/2+1) -> full Hermitian spectrum n0 x n1.
std::vector<Complex> expand_half(FftwBuffer<fftw_complex>& half, int n0, int n1, double scale) {
  const int nh = n1 / 2 + 1;
  std::vector<Complex> full(static_cast<std::size_t>(n0) * n1);
  for (int a = 0; a < n0; ++a) {
    const int ma = (n0 - a) % n0;
    for (int b = 0; b < n1; ++b) {
      Complex v;
      if (b < nh) {
        v = to_complex(half[static_cast<std::size_t>(a) * nh + b]);
      } else {
        v = std::conj(to_complex(half[static_cast<std::size_t>(ma) * nh + (n1 - b)]));
      }
      full[static_cast<std::size_t>(a) * n1 + b] = v * scale;
    }
  }
  return full;
}

void fill_half(std::span<const Complex> full, FftwBuffer<fftw_complex>& half, int n0, int n1) {
  const int nh = n1 / 2 + 1;
  for (int a = 0; a < n0; ++a) {
    for (int b = 0; b < nh; ++b) {
      const Complex v = full[static_cast<std::size_t>(a) * n1 + b];
      auto& dst = half[static_cast<std::size_t>(a) * nh + b];
      dst[0] = v.real();
      dst[1] = v.imag();
    }
  }
}

std::vector<Complex> r2c(std::span<const double> samples, int n0, int n1) {
  const int rows = n0 > 0 ? n0 : 1;
  const PlanPair plan = PlanCache::instance().get(n0, n1);
  FftwBuffer<double> in(static_cast<std::size_t>(rows) * n1);
  FftwBuffer<fftw_complex> out(static_cast<std::size_t>(rows) * (n1 / 2 + 1));
  std::copy(samples.begin(), samples.end(), in.data());
  fftw_execute_dft_r2c(plan.forward, in.data(), out.data());
  return expand_half(out, rows, n1, 1.0 / (static_cast<double>(rows) * n1));
}

std::vector<double> c2r(std::span<const Complex> full, int n0, int n1) {
  const int rows = n0 > 0 ? n0 : 1;
  const PlanPair plan = PlanCache::instance().get(n0, n1);
  FftwBuffer<fftw_complex> in(static_cast<std::size_t>(rows) * (n1 / 2 + 1));
  FftwBuffer<double> out(static_cast<std::size_t>(rows) * n1);
  fill_half(full, in, rows, n1);
  fftw_execute_dft_c2r(plan.backward, in.data(), out.data());
  return std::vector<double>(out.data(), out.data() + out.size());
}

// Signed index -> storage slot on a length-n periodic axis.
int slot(int k, int n) { return ((k % n) + n) % n; }

// Targets of a coarse coefficient on a refined axis; Nyquist splits in two.
int refined_targets(int k, int n_coarse, int n_fine, int out_slot[2], double out_w[2]) {
  if (k == -n_coarse / 2 && n_fine > n_coarse) {
    out_slot[0] = slot(k, n_fine);
    out_slot[1] = slot(-k, n_fine);
    out_w[0] = out_w[1] = 0.5;
    return 2;
  }
  out_slot[0] = slot(k, n_fine);
  out_w[0] = 1.0;
  return 1;
}

}  // namespace

SpectralField forward_transform(const Grid& grid, std::span<const double> samples) {
  if (samples.size() != grid.size()) {
    throw std::invalid_argument("forward_transform: expected " + std::to_string(grid.size()) +
                                " samples, got " + std::to_string(samples.size()));
  }
  return SpectralField(grid, r2c(samples, grid.nx(), grid.ny()));
}

std::vector<double> inverse_transform(const SpectralField& f) {
  const Grid& g = f.grid();
  return c2r(f.coeffs(), g.nx(), g.ny());
}

SpectralField spectral_derivative(const SpectralField& f, Axis axis, int order) {
  if (order < 0) throw std::invalid_argument("spectral_derivative: negative order");
  if (order == 0) return f;
  const Grid& g = f.grid();
  const bool odd = order % 2 == 1;
  static constexpr Complex kPowersOfI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex unit = kPowersOfI[order % 4];
  const int n = axis == Axis::kX1 ? g.nx() : g.ny();
  std::vector<Complex> symbol(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const bool nyquist = axis == Axis::kX1 ? g.is_nyquist_j(k) : g.is_nyquist_m(k);
    if (odd && nyquist) continue;
    const double kappa = axis == Axis::kX1 ? g.kappa1(k) : g.kappa2(k);
    double p = 1.0;
    for (int r = 0; r < order; ++r) p *= kappa;
    symbol[static_cast<std::size_t>(k)] = unit * p;
  }
  SpectralField out(g);
  for (int jj = 0; jj < g.nx(); ++jj) {
    for (int mm = 0; mm < g.ny(); ++mm) {
      const std::size_t i = g.index(jj, mm);
      out[i] = f[i] * symbol[static_cast<std::size_t>(axis == Axis::kX1 ? jj : mm)];
    }
  }
  return out;
}

void dealias_in_place(SpectralField& f) {
  const Grid& g = f.grid();
  const int bj = g.band_j();
  const int bm = g.band_m();
  for (int jj = 0; jj < g.nx(); ++jj) {
    const bool row_out = std::abs(g.signed_j(jj)) > bj;
    for (int mm = 0; mm < g.ny(); ++mm) {
      if (row_out || std::abs(g.signed_m(mm)) > bm) f[g.index(jj, mm)] = 0.0;
    }
  }
}

SpectralField dealias(SpectralField f) {
  dealias_in_place(f);
  return f;
}

SpectralField multiply(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("multiply: grid mismatch");
  auto sa = inverse_transform(a);
  const auto sb = inverse_transform(b);
  for (std::size_t i = 0; i < sa.size(); ++i) sa[i] *= sb[i];
  auto out = forward_transform(a.grid(), sa);
  dealias_in_place(out);
  return out;
}

std::vector<double> oversampled_samples(const SpectralField& f, int factor) {
  if (factor < 1) throw std::invalid_argument("oversampled_samples: factor must be >= 1");
  const Grid& g = f.grid();
  if (factor == 1) return inverse_transform(f);
  const int nx = g.nx() * factor;
  const int ny = g.ny() * factor;
  std::vector<Complex> fine(static_cast<std::size_t>(nx) * ny);
  for (int jj = 0; jj < g.nx(); ++jj) {
    for (int mm = 0; mm < g.ny(); ++mm) {
      const Complex c = f[g.index(jj, mm)];
      if (c == Complex{}) continue;
      int sj[2], sm[2];
      double wj[2], wm[2];
      const int nj = refined_targets(g.signed_j(jj), g.nx(), nx, sj, wj);
      const int nm = refined_targets(g.signed_m(mm), g.ny(), ny, sm, wm);
      for (int a = 0; a < nj; ++a) {
        for (int b = 0; b < nm; ++b) {
          fine[static_cast<std::size_t>(sj[a]) * ny + sm[b]] += wj[a] * wm[b] * c;
        }
      }
    }
  }
  return c2r(fine, nx, ny);
}

std::vector<Complex> forward_transform_1d(std::span<const double> samples) {
  const int n = static_cast<int>(samples.size());
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("forward_transform_1d: length must be even");
  return r2c(samples, 0, n);
}

std::vector<double> inverse_transform_1d(std::span<const Complex> coeffs) {
  const int n = static_cast<int>(coeffs.size());
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("inverse_transform_1d: length must be even");
  return c2r(coeffs, 0, n);
}

std::vector<double> oversampled_samples_1d(std::span<const Complex> coeffs, int factor) {
  const int n = static_cast<int>(coeffs.size());
  if (factor < 1) throw std::invalid_argument("oversampled_samples_1d: factor must be >= 1");
  const int nf = n * factor;
  std::vector<Complex> fine(nf);
  for (int i = 0; i < n; ++i) {
    const int k = i < n / 2 ? i : i - n;
    int s[2];
    double w[2];
    const int nt = refined_targets(k, n, nf, s, w);
    for (int a = 0; a < nt; ++a) fine[s[a]] += w[a] * coeffs[i];
  }
  return inverse_transform_1d(fine);
}

}  // namespace abq
