#include "thermo/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "thermo/errors.hpp"

namespace thermo {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(CouplingKind kind) {
  return kind == CouplingKind::Strong ? "strong" : "weak";
}

std::string_view to_string(BoundaryCase bc) {
  switch (bc) {
    case BoundaryCase::DD: return "DD";
    case BoundaryCase::DN: return "DN";
    case BoundaryCase::ND: return "ND";
    case BoundaryCase::NN: return "NN";
  }
  return "??";
}

CouplingKind parse_coupling_kind(std::string_view text) {
  const std::string t = lower(text);
  if (t == "strong") return CouplingKind::Strong;
  if (t == "weak") return CouplingKind::Weak;
  throw ValidationError("model: expected \"strong\" or \"weak\", got \"" + std::string(text) + "\"");
}

BoundaryCase parse_boundary_case(std::string_view text) {
  const std::string t = lower(text);
  if (t == "dd") return BoundaryCase::DD;
  if (t == "dn") return BoundaryCase::DN;
  if (t == "nd") return BoundaryCase::ND;
  if (t == "nn") return BoundaryCase::NN;
  throw ValidationError("bc: expected one of DD, DN, ND, NN, got \"" + std::string(text) + "\"");
}

bool displacement_dirichlet(BoundaryCase bc) {
  return bc == BoundaryCase::DD || bc == BoundaryCase::DN;
}

bool temperature_dirichlet(BoundaryCase bc) {
  return bc == BoundaryCase::DD || bc == BoundaryCase::ND;
}

CouplingModel::CouplingModel(CouplingKind kind, double gamma) : kind_(kind), gamma_(gamma) {
  if (!std::isfinite(gamma) || gamma <= 0.0) {
    std::ostringstream msg;
    msg << "gamma must be finite and strictly positive, got " << gamma;
    throw ValidationError(msg.str());
  }
}

CouplingModel CouplingModel::uncoupled(CouplingKind kind) {
  return CouplingModel(kind, 0.0, UncheckedTag{});
}

CouplingModel CouplingModel::with_gamma(double gamma) const {
  if (gamma == 0.0) return uncoupled(kind_);
  return CouplingModel(kind_, gamma);
}

std::string describe(const CouplingModel& model, BoundaryCase bc) {
  std::ostringstream out;
  out << to_string(model.kind()) << "/" << to_string(bc) << " gamma=" << model.gamma();
  return out.str();
}

}  // namespace thermo
