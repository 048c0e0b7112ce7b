// Symmetric tridiagonal eigensolver: Sturm-count bisection for eigenvalues,
// inverse iteration (partial-pivoting LU of T - xI) for eigenvectors.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "doubling/errors.hpp"
#include "doubling/philox.hpp"
#include "doubling/spectral.hpp"

namespace doubling {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kMaxSize = 100000;
constexpr int kInverseIterations = 3;
// Eigenvectors whose eigenvalues are closer than this (relative to ||T||)
// are explicitly orthogonalized against each other.
constexpr double kOrthoWindow = 1e-4;

struct TridiagonalView {
  std::span<const double> d;
  std::span<const double> e;
  double pivmin;
  double norm;
};

TridiagonalView make_view(std::span<const double> d, std::span<const double> e) {
  if (d.empty()) throw ValidationError("eigensolve: empty matrix");
  if (e.size() + 1 != d.size()) throw ValidationError("eigensolve: off-diagonal length must be N-1");
  if (d.size() > kMaxSize) {
    throw ValidationError("eigensolve: N = " + std::to_string(d.size()) + " exceeds " +
                          std::to_string(kMaxSize));
  }
  double max_e2 = 1.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!std::isfinite(d[i])) throw ValidationError("eigensolve: non-finite diagonal entry");
    double row = std::abs(d[i]);
    if (i > 0) row += std::abs(e[i - 1]);
    if (i < e.size()) {
      row += std::abs(e[i]);
      max_e2 = std::max(max_e2, e[i] * e[i]);
    }
    norm = std::max(norm, row);
  }
  return {d, e, std::numeric_limits<double>::min() * max_e2, norm};
}

std::size_t count_below(const TridiagonalView& t, double x) {
  std::size_t count = 0;
  double q = t.d[0] - x;
  if (std::abs(q) < t.pivmin) q = -t.pivmin;
  if (q < 0) ++count;
  for (std::size_t i = 1; i < t.d.size(); ++i) {
    q = t.d[i] - x - t.e[i - 1] * t.e[i - 1] / q;
    if (std::abs(q) < t.pivmin) q = -t.pivmin;
    if (q < 0) ++count;
  }
  return count;
}

// Eigenvalues with index in [count_lo, count_hi) lie in [lo, hi).
void bisect(const TridiagonalView& t, double lo, double hi, std::size_t count_lo,
            std::size_t count_hi, std::vector<double>& out) {
  while (count_hi > count_lo) {
    const double mid = lo + 0.5 * (hi - lo);
    const double tol = std::max(2.0 * kEps * std::max(std::abs(lo), std::abs(hi)), kEps * t.norm);
    if (hi - lo <= tol || mid <= lo || mid >= hi) {
      std::fill(out.begin() + static_cast<std::ptrdiff_t>(count_lo),
                out.begin() + static_cast<std::ptrdiff_t>(count_hi), mid);
      return;
    }
    const std::size_t c = std::clamp(count_below(t, mid), count_lo, count_hi);
    if (c > count_lo && c < count_hi) {
      bisect(t, lo, mid, count_lo, c, out);
      lo = mid;
      count_lo = c;
    } else if (c == count_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
}

std::vector<double> eigenvalues(const TridiagonalView& t) {
  const std::size_t n = t.d.size();
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(t.e[i - 1]);
    if (i + 1 < n) r += std::abs(t.e[i]);
    lo = std::min(lo, t.d[i] - r);
    hi = std::max(hi, t.d[i] + r);
  }
  const double pad = 2.0 * kEps * t.norm + 4.0 * t.pivmin + 1e-300;
  lo -= pad + 2.0 * kEps * std::abs(lo);
  hi += pad + 2.0 * kEps * std::abs(hi);
  std::vector<double> out(n);
  bisect(t, lo, hi, 0, n, out);
  return out;
}

// LU factorization of T - xI with partial pivoting, stored as in LAPACK dlagtf:
// U has diagonal u0 and two superdiagonals u1, u2.
class ShiftedLu {
 public:
  ShiftedLu(const TridiagonalView& t, double shift)
      : n_(t.d.size()), u0_(n_), u1_(n_), u2_(n_), l_(n_), swapped_(n_, 0) {
    const double tiny = std::max(kEps * t.norm, t.pivmin);
    auto guard = [tiny](double pivot) {
      return std::abs(pivot) < tiny ? std::copysign(tiny, pivot) : pivot;
    };
    double diag = t.d[0] - shift;
    double sup = n_ > 1 ? t.e[0] : 0.0;
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      const double sub = t.e[i];
      const double next_diag = t.d[i + 1] - shift;
      const double next_sup = i + 2 < n_ ? t.e[i + 1] : 0.0;
      if (std::abs(diag) >= std::abs(sub)) {
        diag = guard(diag);
        l_[i] = sub / diag;
        u0_[i] = diag;
        u1_[i] = sup;
        u2_[i] = 0.0;
        diag = next_diag - l_[i] * sup;
        sup = next_sup;
      } else {
        l_[i] = diag / sub;
        swapped_[i] = 1;
        u0_[i] = sub;
        u1_[i] = next_diag;
        u2_[i] = next_sup;
        diag = sup - l_[i] * next_diag;
        sup = -l_[i] * next_sup;
      }
    }
    u0_[n_ - 1] = guard(diag);
  }

  void solve(std::vector<double>& b) const {
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (swapped_[i]) std::swap(b[i], b[i + 1]);
      b[i + 1] -= l_[i] * b[i];
    }
    for (std::size_t k = n_; k-- > 0;) {
      double acc = b[k];
      if (k + 1 < n_) acc -= u1_[k] * b[k + 1];
      if (k + 2 < n_) acc -= u2_[k] * b[k + 2];
      b[k] = acc / u0_[k];
    }
  }

 private:
  std::size_t n_;
  std::vector<double> u0_, u1_, u2_, l_;
  std::vector<char> swapped_;
};

double norm2(std::span<const double> v) {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x / scale) * (x / scale);
  return scale * std::sqrt(ss);
}

void normalize(std::vector<double>& v) {
  const double nrm = norm2(v);
  for (double& x : v) x /= nrm;
}

void start_vector(std::size_t index, std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); i += 4) {
    const PhiloxBlock block = philox4x64(
        {i / 4, index, static_cast<std::uint64_t>(Stream::kStartVector), 0}, {0x5eed, 0});
    for (std::size_t j = 0; j < 4 && i + j < v.size(); ++j) {
      v[i + j] = static_cast<double>(block[j] >> 11) * 0x1p-52 - 1.0;
    }
  }
}

}  // namespace

std::size_t sturm_count(std::span<const double> diagonal, std::span<const double> off_diagonal,
                        double x) {
  return count_below(make_view(diagonal, off_diagonal), x);
}

std::vector<double> tridiagonal_eigenvalues(std::span<const double> diagonal,
                                            std::span<const double> off_diagonal) {
  return eigenvalues(make_view(diagonal, off_diagonal));
}

std::vector<EigenPair> tridiagonal_eigensolve(std::span<const double> diagonal,
                                              std::span<const double> off_diagonal) {
  const TridiagonalView t = make_view(diagonal, off_diagonal);
  const std::vector<double> values = eigenvalues(t);
  const std::size_t n = values.size();
  std::vector<EigenPair> pairs(n);
  if (n == 1) {
    pairs[0] = {values[0], {1.0}};
    return pairs;
  }

  const double separation = 10.0 * kEps * std::max(t.norm, t.pivmin);
  const double window = kOrthoWindow * std::max(t.norm, t.pivmin);
  std::size_t window_start = 0;
  double previous_shift = -std::numeric_limits<double>::infinity();
  std::vector<double> v(n);

  for (std::size_t k = 0; k < n; ++k) {
    while (values[k] - values[window_start] > window) ++window_start;
    // Coincident eigenvalues need distinct shifts.
    double shift = values[k];
    if (k > 0 && shift - previous_shift < separation) shift = previous_shift + separation;
    previous_shift = shift;

    const ShiftedLu lu(t, shift);
    start_vector(k, v);
    normalize(v);
    for (int it = 0; it < kInverseIterations; ++it) {
      lu.solve(v);
      normalize(v);
      for (std::size_t j = window_start; j < k; ++j) {
        const std::vector<double>& u = pairs[j].eigenvector;
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += u[i] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= dot * u[i];
      }
      normalize(v);
    }
    std::size_t peak = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (std::abs(v[i]) > std::abs(v[peak])) peak = i;
    }
    if (v[peak] < 0) {
      for (double& x : v) x = -x;
    }
    pairs[k] = {values[k], v};
  }
  return pairs;
}

std::vector<EigenPair> eigensolve(const TridiagonalOperator& op) {
  const std::vector<double> off = op.off_diagonal();
  return tridiagonal_eigensolve(op.diagonal(), off);
}

double eigen_residual(const TridiagonalOperator& op, const EigenPair& pair) {
  std::vector<double> hpsi(op.size());
  op.apply(pair.eigenvector, hpsi);
  for (std::size_t i = 0; i < hpsi.size(); ++i) hpsi[i] -= pair.eigenvalue * pair.eigenvector[i];
  return norm2(hpsi);
}

}  // namespace doubling
