#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nsdecay/catalog.hpp"
#include "nsdecay/core_model.hpp"
#include "nsdecay/multipliers.hpp"
#include "nsdecay/spectral_solver.hpp"

namespace nsdecay {

/// Resolution controls for frequency-space L2 norms.
struct QuadratureSpec {
  double r_min = 0.0;
  double r_max = 0.0;  // 0 selects the automatic cutoff
  int panels_per_halfperiod = 4;
  int circle_nodes = 64;   // n = 2
  int sphere_degree = 21;  // n = 3, exact for spherical polynomials up to this degree
  double rel_tol = 1e-7;
  int max_doublings = 6;

  void validate() const;
  bool operator==(const QuadratureSpec&) const = default;
};

/// Nodes and weights on S^{n-1}; the weights sum to |S^{n-1}|.
struct AngularRule {
  int n = 1;
  std::vector<double> nodes;  // node k occupies nodes[k*n .. k*n+n)
  std::vector<double> weights;

  static AngularRule for_dimension(int n, const QuadratureSpec& spec);
  std::size_t size() const { return weights.size(); }
  std::span<const double> node(std::size_t k) const { return {nodes.data() + k * n, static_cast<std::size_t>(n)}; }
};

/// Scale information used to place panels and the automatic cutoff.
struct RadialHints {
  double oscillation = 0.0;  // k in cos(k r); panels resolve pi/k
  double diffusion = 0.0;    // c with |m(r)| <~ exp(-c r^2)
};

/// A (possibly multi-channel) function on frequency space. Each channel is integrated
/// as |f_c|^2; shell(r) is called once before the angular sweep at radius r.
class SpectralField {
 public:
  virtual ~SpectralField() = default;
  virtual int dim() const = 0;
  virtual int channels() const { return 1; }
  /// Leading channels held to the self-convergence test; the rest only set its absolute scale.
  virtual int checked_channels() const { return channels(); }
  virtual RadialHints hints() const = 0;
  /// Automatic upper radius when QuadratureSpec::r_max is 0.
  virtual double auto_r_max() const;
  virtual void shell(double /*r*/) {}
  /// Writes |f_c(r omega)|^2 into out[c].
  virtual void eval_sq(double r, std::span<const double> omega, std::span<double> out) = 0;
};

/// Single-channel field given by a callable on xi.
class FunctionField : public SpectralField {
 public:
  FunctionField(int n, std::function<cplx(std::span<const double>)> f, RadialHints hints);
  int dim() const override { return n_; }
  RadialHints hints() const override { return hints_; }
  void eval_sq(double r, std::span<const double> omega, std::span<double> out) override;

 private:
  int n_;
  std::function<cplx(std::span<const double>)> f_;
  RadialHints hints_;
  std::vector<double> xi_;
};

/// (|S^{n-1}| int_{r_min}^{r_max} |m(r)|^2 r^{n-1} dr)^{1/2}.
double l2_norm_radial(const std::function<cplx(double)>& m, int n, const QuadratureSpec& spec,
                      RadialHints hints = {});

/// (int_window |f|^2 dxi)^{1/2} per channel, n <= 3.
std::vector<double> l2_norm_field_channels(SpectralField& f, const QuadratureSpec& spec,
                                           const FrequencyWindow& window);
double l2_norm_field(SpectralField& f, const QuadratureSpec& spec, const FrequencyWindow& window);

enum class Quantity {
  rho,
  v,
  pair,
  rho_minus_heat,
  v_minus_heat,
  rho_minus_heat_minus_profile,
  v_minus_heat_minus_profile,
  rho_minus_profile2,
  v_minus_profile2,
};

std::string to_string(Quantity q);

/// Spectral combinations of the solution at time t, one channel per requested quantity
/// (pair contributes the rho and v channels and is assembled by solution_norms).
class SolutionField : public SpectralField {
 public:
  SolutionField(const FluidParams& p, const InitialDatum& d, double t, std::vector<Quantity> which);

  int dim() const override { return p_.n; }
  int channels() const override { return static_cast<int>(base_.size()) + 1; }
  int checked_channels() const override { return static_cast<int>(base_.size()); }
  RadialHints hints() const override;
  double auto_r_max() const override;
  void shell(double r) override;
  void eval_sq(double r, std::span<const double> omega, std::span<double> out) override;

  /// Index into the channel list of a base (non-pair) quantity; -1 when absent. The last
  /// channel holds kernel size times datum size, the roundoff scale for cancelling quantities.
  int channel_of(Quantity q) const;
  bool raw_requested() const;

 private:
  FluidParams p_;
  const InitialDatum* d_;
  double t_;
  std::vector<Quantity> base_;
  bool need_profile1_ = false, need_profile2_ = false;
  bool need_raw_ = false, need_mh_ = false;
  std::unique_ptr<ProfileField> prof1_rho_, prof1_v_, prof2_rho_, prof2_v_;

  // shell cache
  double r_ = -1.0;
  SolutionKernels ker_;
  bool have_k_ = false;
  KFamily kf_;
  JFamily jf_;
  std::vector<double> xi_;
  std::vector<cplx> gv_, ptmp_;
};

/// Physical L2 norm of each requested quantity, i.e. (2 pi)^{-n/2} times the frequency norm.
/// Raw rho, v, pair are rejected with DivergentAtOrigin for dot_H11 data with b0 > 0,
/// n <= 2 and r_min = 0.
std::vector<double> solution_norms(const FluidParams& p, const InitialDatum& d, double t,
                                   std::span<const Quantity> which, const QuadratureSpec& spec,
                                   const FrequencyWindow& window);
double solution_norm(const FluidParams& p, const InitialDatum& d, double t, Quantity which,
                     const QuadratureSpec& spec, const FrequencyWindow& window);

/// Physical-space samples on the grid x_k = k L/(2M+1), |k| <= M, obtained from the
/// truncated inverse transform over the lattice xi_j = j h, |j| <= M = floor(R/h).
/// Approximate: aliasing O(exp(-c R^2 t)) plus periodization with period 2 pi/h.
struct GridSnapshot {
  int n = 1;
  double h = 0.0;
  double R = 0.0;
  double t = 0.0;
  std::vector<double> axis;               // 1-D coordinates per axis
  std::vector<double> rho;                // row-major over axis^n
  std::vector<std::vector<double>> v;     // component k, same layout as rho
  std::vector<std::string> warnings;
};

GridSnapshot synthesize_grid_field(const FluidParams& p, const InitialDatum& d, double t, double h, double R);

void write_snapshot(std::ostream& os, const GridSnapshot& s);

/// CSV with header t,value,envelope,ratio and 17 significant digits.
void write_norm_table(std::ostream& os, std::span<const double> times, std::span<const double> values,
                      const Envelope& env);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace nsdecay
