#include "curlspec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curlspec/error.hpp"

namespace curlspec {

using std::numbers::pi;

std::string to_string(ModeFamily f) {
  switch (f) {
    case ModeFamily::Dirichlet: return "dirichlet";
    case ModeFamily::Neumann: return "neumann";
    case ModeFamily::Maxwell: return "maxwell";
  }
  return "unknown";
}

bool ModeIndex::admissible() const noexcept {
  if (l < 0 || m < 0 || n < 0) return false;
  switch (family) {
    case ModeFamily::Dirichlet: return l >= 1 && m >= 1 && n >= 1;
    case ModeFamily::Neumann: return true;
    case ModeFamily::Maxwell: return (l == 0) + (m == 0) + (n == 0) <= 1;
  }
  return false;
}

int ModeIndex::multiplicity() const noexcept {
  if (family == ModeFamily::Maxwell && l > 0 && m > 0 && n > 0) return 2;
  return 1;
}

namespace {

int lowest_index(ModeFamily f) { return f == ModeFamily::Dirichlet ? 1 : 0; }

void check_sides(double a, double b, double c) {
  if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0)) throw InvalidSpecError("box sides must be positive");
}

// Integer enumeration of q = l^2 + m^2 + n^2 <= Q.
std::vector<std::int64_t> cube_integers_upto(ModeFamily family, std::int64_t Q) {
  std::vector<std::int64_t> out;
  const int lo = lowest_index(family);
  const int bound = static_cast<int>(std::floor(std::sqrt(static_cast<double>(Q)))) + 1;
  for (int l = lo; l <= bound; ++l) {
    for (int m = lo; m <= bound; ++m) {
      for (int n = lo; n <= bound; ++n) {
        const ModeIndex idx{l, m, n, family};
        if (!idx.admissible()) continue;
        const std::int64_t q = std::int64_t{l} * l + std::int64_t{m} * m + std::int64_t{n} * n;
        if (q > Q) continue;
        for (int r = 0; r < idx.multiplicity(); ++r) out.push_back(q);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

BoxModes enumerate_box_modes(ModeFamily family, double a, double b, double c, double ceiling) {
  check_sides(a, b, c);
  BoxModes modes;
  modes.ceiling = ceiling;
  const double root = ceiling > 0.0 ? std::sqrt(ceiling) / pi : 0.0;
  modes.index_bound = {static_cast<int>(std::floor(a * root * (1.0 + 1e-12))),
                       static_cast<int>(std::floor(b * root * (1.0 + 1e-12))),
                       static_cast<int>(std::floor(c * root * (1.0 + 1e-12)))};
  const int lo = lowest_index(family);
  for (int l = lo; l <= modes.index_bound[0]; ++l) {
    for (int m = lo; m <= modes.index_bound[1]; ++m) {
      for (int n = lo; n <= modes.index_bound[2]; ++n) {
        ++modes.visited;
        const ModeIndex idx{l, m, n, family};
        if (!idx.admissible()) continue;
        const double v = pi * pi * (l * l / (a * a) + m * m / (b * b) + n * n / (c * c));
        if (v > ceiling) continue;
        for (int r = 0; r < idx.multiplicity(); ++r) modes.values.push_back(v);
      }
    }
  }
  std::sort(modes.values.begin(), modes.values.end());
  return modes;
}

std::vector<std::int64_t> cube_spectrum_integers(ModeFamily family, int count) {
  if (count < 1) throw InvalidSpecError("count must be >= 1");
  std::int64_t Q = 4;
  for (;;) {
    auto q = cube_integers_upto(family, Q);
    if (static_cast<int>(q.size()) >= count) {
      q.resize(static_cast<std::size_t>(count));
      return q;
    }
    Q *= 2;
  }
}

std::vector<double> box_spectrum(ModeFamily family, double a, double b, double c, int count) {
  check_sides(a, b, c);
  if (count < 1) throw InvalidSpecError("count must be >= 1");
  if (a == b && b == c) {
    const double scale = (pi / a) * (pi / a);
    std::vector<double> out;
    for (std::int64_t q : cube_spectrum_integers(family, count)) {
      out.push_back(static_cast<double>(q) * scale);
    }
    return out;
  }
  // Start near the Weyl estimate and grow until enough modes are enclosed.
  const double vol = a * b * c;
  double ceiling = std::pow(6.0 * pi * pi * count / vol, 2.0 / 3.0) + pi * pi * (1 / (a * a) + 1 / (b * b) + 1 / (c * c));
  for (;;) {
    BoxModes modes = enumerate_box_modes(family, a, b, c, ceiling);
    if (static_cast<int>(modes.values.size()) >= count) {
      modes.values.resize(static_cast<std::size_t>(count));
      return modes.values;
    }
    ceiling *= 2.0;
  }
}

std::vector<double> box_dirichlet_spectrum(double a, double b, double c, int count) {
  return box_spectrum(ModeFamily::Dirichlet, a, b, c, count);
}
std::vector<double> box_neumann_spectrum(double a, double b, double c, int count) {
  return box_spectrum(ModeFamily::Neumann, a, b, c, count);
}
std::vector<double> box_maxwell_spectrum(double a, double b, double c, int count) {
  return box_spectrum(ModeFamily::Maxwell, a, b, c, count);
}

namespace {

template <class Value, class F>
std::vector<Value> te_tm_upto(int bound, F value_of, Value ceiling) {
  std::vector<Value> out;
  for (int l = 0; l <= bound; ++l) {
    for (int m = 0; m <= bound; ++m) {
      for (int n = 0; n <= bound; ++n) {
        const Value v = value_of(l, m, n);
        if (v > ceiling) continue;
        if (l >= 1 && m >= 1) out.push_back(v);          // TM
        if (n >= 1 && (l != 0 || m != 0)) out.push_back(v);  // TE
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::int64_t> cube_maxwell_te_tm_integers(int count) {
  std::int64_t Q = 4;
  for (;;) {
    const int bound = static_cast<int>(std::floor(std::sqrt(static_cast<double>(Q)))) + 1;
    auto q = te_tm_upto<std::int64_t>(
        bound, [](int l, int m, int n) { return std::int64_t{l} * l + std::int64_t{m} * m + std::int64_t{n} * n; }, Q);
    if (static_cast<int>(q.size()) >= count) {
      q.resize(static_cast<std::size_t>(count));
      return q;
    }
    Q *= 2;
  }
}

std::vector<double> box_maxwell_te_tm_spectrum(double a, double b, double c, int count) {
  check_sides(a, b, c);
  double ceiling = 4.0 * pi * pi * (1 / (a * a) + 1 / (b * b) + 1 / (c * c));
  for (;;) {
    const double root = std::sqrt(ceiling) / pi;
    const int bound = static_cast<int>(std::ceil(std::max({a, b, c}) * root)) + 1;
    auto v = te_tm_upto<double>(
        bound, [&](int l, int m, int n) { return pi * pi * (l * l / (a * a) + m * m / (b * b) + n * n / (c * c)); },
        ceiling);
    if (static_cast<int>(v.size()) >= count) {
      v.resize(static_cast<std::size_t>(count));
      return v;
    }
    ceiling *= 2.0;
  }
}

namespace {

void check_lengths(std::size_t alpha, std::size_t lambda, int kmax) {
  if (kmax < 1) throw InvalidSpecError("kmax must be >= 1");
  if (alpha < static_cast<std::size_t>(2 * kmax + 1)) {
    throw InsufficientSpectrumError("alpha spectrum needs at least 2*kmax+1 = " + std::to_string(2 * kmax + 1) +
                                    " values, got " + std::to_string(alpha));
  }
  if (lambda < static_cast<std::size_t>(kmax)) {
    throw InsufficientSpectrumError("lambda spectrum needs at least kmax = " + std::to_string(kmax) +
                                    " values, got " + std::to_string(lambda));
  }
}

}  // namespace

InterlaceCheck interlace_check(std::span<const double> alpha, std::span<const double> lambda, int kmax,
                               std::span<const double> tol_per_k) {
  check_lengths(alpha.size(), lambda.size(), kmax);
  if (tol_per_k.size() < static_cast<std::size_t>(kmax)) throw InvalidSpecError("need one tolerance per k");
  InterlaceCheck out;
  out.pass = true;
  for (int k = 1; k <= kmax; ++k) {
    InterlaceRecord r;
    r.k = k;
    r.alpha_2k1 = alpha[2 * k];
    r.lambda_k = lambda[k - 1];
    r.margin = r.lambda_k - r.alpha_2k1;
    r.tolerance = tol_per_k[k - 1];
    r.pass = r.margin >= -r.tolerance;
    r.strict = r.margin > r.tolerance;
    out.pass = out.pass && r.pass;
    out.records.push_back(r);
  }
  return out;
}

InterlaceCheck interlace_check(std::span<const double> alpha, std::span<const double> lambda, int kmax, double tol) {
  std::vector<double> tols(static_cast<std::size_t>(std::max(kmax, 0)), tol);
  return interlace_check(alpha, lambda, kmax, tols);
}

InterlaceCheck interlace_check_exact(std::span<const std::int64_t> alpha, std::span<const std::int64_t> lambda,
                                     int kmax) {
  check_lengths(alpha.size(), lambda.size(), kmax);
  InterlaceCheck out;
  out.pass = true;
  for (int k = 1; k <= kmax; ++k) {
    const std::int64_t a = alpha[2 * k];
    const std::int64_t l = lambda[k - 1];
    InterlaceRecord r;
    r.k = k;
    r.alpha_2k1 = static_cast<double>(a);
    r.lambda_k = static_cast<double>(l);
    r.margin = static_cast<double>(l - a);
    r.pass = a <= l;
    r.strict = a < l;
    out.pass = out.pass && r.pass;
    out.records.push_back(r);
  }
  return out;
}

std::size_t counting_function(std::span<const double> ascending, double V) {
  return static_cast<std::size_t>(std::upper_bound(ascending.begin(), ascending.end(), V) - ascending.begin());
}

std::vector<double> merge_spectra(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), out.begin());
  return out;
}

}  // namespace curlspec
