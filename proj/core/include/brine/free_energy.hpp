#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace brine {

/// Provider of the Ising magnetization curve at coupling J: the spontaneous
/// magnetization m*, the field-to-magnetization map m(h) and its inverse h(m)
/// on [m*, 1). Implementations are immutable after construction.
class MagnetizationModel {
 public:
  virtual ~MagnetizationModel() = default;

  virtual std::string name() const = 0;
  virtual double coupling() const noexcept = 0;
  virtual double spontaneous_m() const noexcept = 0;

  /// Magnetization at field h; odd in h, with mag_for(0) = m* (the h = 0+ branch).
  virtual double mag_for(double h) const;

  /// Unique h >= 0 with mag_for(h) = m. Throws DomainError for m < m* or m >= 1.
  virtual double field_for(double m) const = 0;

  /// Canonical free energy F_J(m) = ∫_{m*}^{|m|} h(m') dm'. Zero on [-m*, m*].
  /// The default integrates field_for numerically.
  virtual double free_energy(double m) const;

  /// F_J'(m): sign(m) h(|m|) outside the flat piece, 0 on it.
  double free_energy_slope(double m) const;

 protected:
  /// Throws unless m* <= m < 1; returns true when m is exactly m*.
  bool check_field_domain(double m) const;
};

using ModelPtr = std::shared_ptr<const MagnetizationModel>;

/// Positive-branch root of m = tanh(2dJ m + h), odd in h; for h = 0 returns the
/// spontaneous (largest) root.
double mean_field_mag(double h, double J, int d);

/// Exact two-dimensional spontaneous magnetization (1 - sinh(2J)^-4)^(1/8), zero
/// at and below J_c = log(1 + √2)/2.
double onsager_spontaneous_m(double J);

/// Critical coupling of the square lattice, log(1 + √2)/2.
double onsager_critical_coupling() noexcept;

/// Curie-Weiss model on a d-dimensional lattice: h(m) = atanh(m) - 2dJ m.
ModelPtr make_mean_field(double J, int d);

/// Exact 2D m*; the field curve above m* is the d = 2 mean-field curve,
/// linearly reparametrised from [m*_MF, 1) onto [m*, 1).
ModelPtr make_onsager_2d(double J);

struct MagnetizationSample {
  double h;
  double m;
};

/// Monotone piecewise-linear m(h) through measured samples. The first sample
/// must sit at h = 0 (its m is m*); h and m must be strictly increasing.
/// Beyond the last sample the field curve continues as h_last + atanh(m) - atanh(m_last).
ModelPtr make_tabulated(std::vector<MagnetizationSample> samples, double J);

/// Reads a two-column CSV with header "h,m".
std::vector<MagnetizationSample> read_magnetization_csv(std::istream& in);

/// F_J by adaptive Simpson quadrature of field_for, irrespective of any closed form.
double free_energy_by_quadrature(const MagnetizationModel& model, double m);

struct FreeEnergyCurve {
  std::vector<double> grid;    ///< ascending, symmetric about 0, inside (-1, 1)
  std::vector<double> values;  ///< F_J at the grid points
  double mStar = 0.0;
};

/// Samples F_J at the midpoints of `gridSize` equal cells partitioning (-1, 1).
FreeEnergyCurve tabulate(const MagnetizationModel& model, int gridSize);

/// Writes "m,F" CSV with full precision.
void write_csv(std::ostream& out, const FreeEnergyCurve& curve);

}  // namespace brine
