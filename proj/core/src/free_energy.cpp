#include "brine/free_energy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "brine/errors.hpp"
#include "brine/numerics.hpp"

namespace brine {

namespace {

constexpr double kEndpointGuard = 1e-12;
constexpr double kQuadratureTol = 1e-10;

// Antiderivative of atanh(m) - 2dJ m.
double mean_field_potential(double m, double two_dJ) {
  auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
  return 0.5 * (xlogx(1.0 + m) + xlogx(1.0 - m)) - 0.5 * two_dJ * m * m;
}

class MeanFieldModel final : public MagnetizationModel {
 public:
  MeanFieldModel(double J, int d) : J_(J), d_(d), mStar_(mean_field_mag(0.0, J, d)) {}

  std::string name() const override { return "mean-field"; }
  double coupling() const noexcept override { return J_; }
  double spontaneous_m() const noexcept override { return mStar_; }
  double mag_for(double h) const override { return mean_field_mag(h, J_, d_); }

  double field_for(double m) const override {
    if (check_field_domain(m)) return 0.0;
    return std::max(0.0, std::atanh(m) - 2.0 * d_ * J_ * m);
  }

  double free_energy(double m) const override {
    const double a = std::abs(m);
    if (a >= 1.0) throw DomainError("free energy: |m| >= 1");
    if (a <= mStar_) return 0.0;
    const double two_dJ = 2.0 * d_ * J_;
    return std::max(0.0, mean_field_potential(a, two_dJ) - mean_field_potential(mStar_, two_dJ));
  }

 private:
  double J_;
  int d_;
  double mStar_;
};

class Onsager2DModel final : public MagnetizationModel {
 public:
  explicit Onsager2DModel(double J)
      : J_(J),
        mStar_(onsager_spontaneous_m(J)),
        mfStar_(mean_field_mag(0.0, J, 2)),
        slope_((1.0 - mfStar_) / (1.0 - mStar_)) {}

  std::string name() const override { return "onsager-2d"; }
  double coupling() const noexcept override { return J_; }
  double spontaneous_m() const noexcept override { return mStar_; }

  double field_for(double m) const override {
    if (check_field_domain(m)) return 0.0;
    const double u = to_mean_field(m);
    return std::max(0.0, std::atanh(u) - 4.0 * J_ * u);
  }

  double free_energy(double m) const override {
    const double a = std::abs(m);
    if (a >= 1.0) throw DomainError("free energy: |m| >= 1");
    if (a <= mStar_) return 0.0;
    const double u = to_mean_field(a);
    const double two_dJ = 4.0 * J_;
    return std::max(0.0, (mean_field_potential(u, two_dJ) - mean_field_potential(mfStar_, two_dJ)) /
                             slope_);
  }

 private:
  double to_mean_field(double m) const {
    return std::min(mfStar_ + (m - mStar_) * slope_, std::nextafter(1.0, 0.0));
  }

  double J_;
  double mStar_;
  double mfStar_;
  double slope_;  // du/dm of the reparametrisation
};

class TabulatedModel final : public MagnetizationModel {
 public:
  TabulatedModel(std::vector<MagnetizationSample> s, double J) : J_(J), samples_(std::move(s)) {
    if (samples_.size() < 2) throw ValidationError("tabulated curve needs at least two samples");
    if (samples_.front().h != 0.0) throw ValidationError("tabulated curve must start at h = 0");
    if (samples_.front().m < 0.0) throw ValidationError("tabulated m at h = 0 must be >= 0");
    for (std::size_t i = 1; i < samples_.size(); ++i) {
      if (!(samples_[i].h > samples_[i - 1].h))
        throw ValidationError(fmt::format("tabulated h not strictly increasing at row {}", i + 1));
      if (!(samples_[i].m > samples_[i - 1].m))
        throw ValidationError(fmt::format("tabulated m not strictly increasing at row {}", i + 1));
    }
    if (!(samples_.back().m < 1.0)) throw ValidationError("tabulated m must stay below 1");
  }

  std::string name() const override { return "tabulated"; }
  double coupling() const noexcept override { return J_; }
  double spontaneous_m() const noexcept override { return samples_.front().m; }

  double mag_for(double h) const override {
    if (h < 0.0) return -mag_for(-h);
    const auto& last = samples_.back();
    if (h >= last.h) return std::tanh(std::atanh(last.m) + (h - last.h));
    auto it = std::upper_bound(samples_.begin(), samples_.end(), h,
                               [](double v, const MagnetizationSample& s) { return v < s.h; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (h - lo.h) / (hi.h - lo.h);
    return lo.m + t * (hi.m - lo.m);
  }

  double field_for(double m) const override {
    if (check_field_domain(m)) return 0.0;
    const auto& last = samples_.back();
    if (m >= last.m) return last.h + std::atanh(m) - std::atanh(last.m);
    auto it = std::upper_bound(samples_.begin(), samples_.end(), m,
                               [](double v, const MagnetizationSample& s) { return v < s.m; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (m - lo.m) / (hi.m - lo.m);
    return lo.h + t * (hi.h - lo.h);
  }

 private:
  double J_;
  std::vector<MagnetizationSample> samples_;
};

}  // namespace

double MagnetizationModel::mag_for(double h) const {
  if (h < 0.0) return -mag_for(-h);
  if (h == 0.0) return spontaneous_m();
  return numerics::bisect_increasing([&](double m) { return field_for(m) - h; }, spontaneous_m(),
                                     1.0, 0.0);
}

double MagnetizationModel::free_energy(double m) const {
  const double a = std::abs(m);
  if (a >= 1.0) throw DomainError("free energy: |m| >= 1");
  if (a <= spontaneous_m()) return 0.0;
  return free_energy_by_quadrature(*this, m);
}

double MagnetizationModel::free_energy_slope(double m) const {
  const double a = std::abs(m);
  if (a <= spontaneous_m()) return 0.0;
  const double f = field_for(a);
  return m < 0.0 ? -f : f;
}

bool MagnetizationModel::check_field_domain(double m) const {
  if (!(m < 1.0)) throw DomainError("field_for: m out of domain (m >= 1)");
  if (m < spontaneous_m())
    throw DomainError(fmt::format("field_for: m = {} inside coexistence interval [-m*, m*], m* = {}",
                                  m, spontaneous_m()));
  return m == spontaneous_m();
}

double mean_field_mag(double h, double J, int d) {
  if (h < 0.0) return -mean_field_mag(-h, J, d);
  const double a = 2.0 * d * J;
  if (h == 0.0 && a <= 1.0) return 0.0;
  // m - tanh(a m + h) is convex on [0, 1] and non-positive at 0: one root above 0.
  return numerics::bisect_increasing([&](double m) { return m - std::tanh(a * m + h); }, 0.0, 1.0,
                                     0.0);
}

double onsager_critical_coupling() noexcept { return 0.5 * std::log1p(std::sqrt(2.0)); }

double onsager_spontaneous_m(double J) {
  if (J <= onsager_critical_coupling()) return 0.0;
  const double s = std::sinh(2.0 * J);
  const double inner = 1.0 - 1.0 / (s * s * s * s);
  return inner <= 0.0 ? 0.0 : std::pow(inner, 0.125);
}

ModelPtr make_mean_field(double J, int d) {
  if (!(J >= 0.0) || !std::isfinite(J)) throw ValidationError("J negative");
  if (d < 1) throw ValidationError("d must be >= 1");
  return std::make_shared<MeanFieldModel>(J, d);
}

ModelPtr make_onsager_2d(double J) {
  if (!(J >= 0.0) || !std::isfinite(J)) throw ValidationError("J negative");
  return std::make_shared<Onsager2DModel>(J);
}

ModelPtr make_tabulated(std::vector<MagnetizationSample> samples, double J) {
  return std::make_shared<TabulatedModel>(std::move(samples), J);
}

std::vector<MagnetizationSample> read_magnetization_csv(std::istream& in) {
  auto strip = [](std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); }),
            s.end());
    return s;
  };
  std::string line;
  if (!std::getline(in, line) || strip(line) != "h,m")
    throw ValidationError("magnetization CSV must start with header \"h,m\"");
  std::vector<MagnetizationSample> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError(fmt::format("CSV row {}: expected h,m", row));
    try {
      std::size_t used = 0;
      const std::string hs = line.substr(0, comma);
      const std::string ms = line.substr(comma + 1);
      const double h = std::stod(hs, &used);
      if (used != hs.size()) throw std::invalid_argument("h");
      const double m = std::stod(ms, &used);
      if (used != ms.size()) throw std::invalid_argument("m");
      out.push_back({h, m});
    } catch (const std::logic_error&) {
      throw ValidationError(fmt::format("CSV row {}: not a number pair: {}", row, line));
    }
  }
  return out;
}

double free_energy_by_quadrature(const MagnetizationModel& model, double m) {
  const double a = std::abs(m);
  if (a >= 1.0) throw DomainError("free energy: |m| >= 1");
  if (a > 1.0 - kEndpointGuard) throw DomainError("free energy: |m| too close to 1 for quadrature");
  const double mStar = model.spontaneous_m();
  if (a <= mStar) return 0.0;
  const double v = numerics::adaptive_simpson([&](double x) { return model.field_for(x); }, mStar, a,
                                              kQuadratureTol);
  return std::max(0.0, v);
}

FreeEnergyCurve tabulate(const MagnetizationModel& model, int gridSize) {
  if (gridSize < 3) throw ValidationError("gridSize must be >= 3");
  FreeEnergyCurve curve;
  curve.mStar = model.spontaneous_m();
  curve.grid.resize(gridSize);
  curve.values.resize(gridSize);
  for (int i = 0; i < gridSize; ++i) {
    // mirror the lower half so the grid is exactly symmetric
    const int j = std::min(i, gridSize - 1 - i);
    double x = -1.0 + (2.0 * j + 1.0) / gridSize;
    if (2 * j + 1 == gridSize) x = 0.0;
    curve.grid[i] = (i == j) ? x : -x;
  }
  for (int i = 0; i < gridSize; ++i) curve.values[i] = model.free_energy(curve.grid[i]);
  return curve;
}

void write_csv(std::ostream& out, const FreeEnergyCurve& curve) {
  out << "m,F\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i)
    fmt::print(out, "{:.17g},{:.17g}\n", curve.grid[i], curve.values[i]);
}

}  // namespace brine
