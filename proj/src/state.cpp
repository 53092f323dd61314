#include "bsq/state.hpp"

namespace bsq {

Triple zero_triple(const Grid& g) {
  Field z = Field::Zero(g.nr(), g.nb());
  return {z, z, z};
}

Triple operator+(const Triple& a, const Triple& b) { return {a.omega + b.omega, a.eta + b.eta, a.xi + b.xi}; }
Triple operator-(const Triple& a, const Triple& b) { return {a.omega - b.omega, a.eta - b.eta, a.xi - b.xi}; }
Triple operator*(double s, const Triple& a) { return {s * a.omega, s * a.eta, s * a.xi}; }

bool all_finite(const Triple& s) { return s.omega.allFinite() && s.eta.allFinite() && s.xi.allFinite(); }

double max_abs(const Triple& s) {
  auto m = [](const Field& f) { return f.size() ? f.cwiseAbs().maxCoeff() : 0.0; };
  return std::max({m(s.omega), m(s.eta), m(s.xi)});
}

}  // namespace bsq
