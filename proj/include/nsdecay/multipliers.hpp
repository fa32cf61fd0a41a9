#pragma once

#include <span>
#include <vector>

#include "nsdecay/catalog.hpp"
#include "nsdecay/core_model.hpp"
#include "nsdecay/spectral_solver.hpp"

namespace nsdecay {

enum class MultiplierId { J0, J1, J2, K0, K1, K2, heat_alpha, heat_half };

/// Radial parts of the diffusion-wave multipliers at (t, r). The vector-valued ones are
///   J1^ = -i j1 xi/|xi|,  K1^ = -i k1 xi/|xi|
/// so j1, k1 are real scalars. All values are real.
struct JFamily {
  double j0 = 0.0;  // (cos(g r t) - 1) e^{-(a+b) r^2 t/2} / r
  double j1 = 0.0;  // sin(g r t) e^{-(a+b) r^2 t/2} / r
  double j2 = 0.0;  // (cos(g r t) e^{-(a+b) r^2 t/2} - e^{-a r^2 t}) / r
};

struct KFamily {
  double k0 = 0.0;  // (A - e^{-(a+b) r^2 t/2}) / r
  double k1 = 0.0;  // g sin(l_I t)/l_I e^{l_R t}
  double k2 = 0.0;  // (C - e^{-a r^2 t}) / r
};

JFamily j_family(const FluidParams& p, double t, double r);
/// Oscillatory regime only (r < r*); throws RegimeError otherwise.
KFamily k_family(const FluidParams& p, double t, double r);
KFamily k_family(const FluidParams& p, double t, const CharRoots& roots, double r);

/// Full multiplier value at xi: one entry for scalar ids, n entries for J1/K1.
std::vector<cplx> eval_multiplier(MultiplierId id, const FluidParams& p, double t, std::span<const double> xi);

/// |K^ - J^| for the pairs (K0,J0), (K1,J1), (K2,J2) at radius r.
double multiplier_gap(MultiplierId k_id, MultiplierId j_id, const FluidParams& p, double t, double r);

enum class ProfileKind { first_order_rho, first_order_v, second_order_rho, second_order_v };

/// Large-time profile in Fourier space. First-order fields see the datum only through
/// P of (|D|rho0, |D|v0); second-order fields only through the Q moments.
class ProfileField {
 public:
  ProfileField(ProfileKind kind, FluidParams p, Thresholds th);

  ProfileKind kind() const { return kind_; }
  int dim() const { return p_.n; }
  int components() const;
  const Thresholds& moments() const { return th_; }

  void eval(double t, std::span<const double> xi, std::span<cplx> out) const;
  /// Same as eval with the radial multipliers supplied by the caller.
  void eval_with(const JFamily& j, double heat_alpha, double heat_half, double r,
                 std::span<const double> omega, std::span<cplx> out) const;

 private:
  ProfileKind kind_;
  FluidParams p_;
  Thresholds th_;
};

/// (rho~, v~): rho~^ = J0^ P_rho + J1^ . P_v,  v~^ = J1^ P_rho + J2^ xi (xi . P_v)/|xi|^2.
std::pair<ProfileField, ProfileField> profile_first_order(const InitialDatum& d, const FluidParams& p);

/// (rho~0, v~0) built on the Q moments; the factor i of the first-moment expansion is
/// kMomentPhase under this library's transform convention.
std::pair<ProfileField, ProfileField> profile_second_order(const InitialDatum& d, const FluidParams& p);

}  // namespace nsdecay
