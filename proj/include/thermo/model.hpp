#pragma once

#include <string>
#include <string_view>

namespace thermo {

enum class CouplingKind { Strong, Weak };

// Displacement condition first, temperature second.
enum class BoundaryCase { DD, DN, ND, NN };

inline constexpr BoundaryCase kAllBoundaryCases[] = {
    BoundaryCase::DD, BoundaryCase::DN, BoundaryCase::ND, BoundaryCase::NN};

inline constexpr double kDefaultGamma = 0.05;

std::string_view to_string(CouplingKind kind);
std::string_view to_string(BoundaryCase bc);

// Case-insensitive: "strong"/"weak", "DD"/"DN"/"ND"/"NN". Throw ValidationError.
CouplingKind parse_coupling_kind(std::string_view text);
BoundaryCase parse_boundary_case(std::string_view text);

// True when the displacement (resp. temperature) condition is Dirichlet.
bool displacement_dirichlet(BoundaryCase bc);
bool temperature_dirichlet(BoundaryCase bc);

/// Coupling kind plus the dimensionless coupling strength gamma.
///
/// The public constructor enforces 0 < gamma < inf. The decoupled system
/// (gamma = 0) is only reachable through uncoupled(), which oracle code uses
/// to compare against the closed-form uncoupled spectrum.
class CouplingModel {
 public:
  CouplingModel(CouplingKind kind, double gamma);

  static CouplingModel uncoupled(CouplingKind kind);

  CouplingKind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  bool is_uncoupled() const { return gamma_ == 0.0; }

  // Same kind, new gamma (gamma == 0 yields the uncoupled model).
  CouplingModel with_gamma(double gamma) const;

  friend bool operator==(const CouplingModel&, const CouplingModel&) = default;

 private:
  struct UncheckedTag {};
  CouplingModel(CouplingKind kind, double gamma, UncheckedTag)
      : kind_(kind), gamma_(gamma) {}

  CouplingKind kind_;
  double gamma_;
};

std::string describe(const CouplingModel& model, BoundaryCase bc);

}  // namespace thermo
