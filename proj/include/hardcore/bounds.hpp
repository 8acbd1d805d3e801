#pragma once

#include <optional>
#include <vector>

#include "hardcore/constraint_graph.hpp"
#include "hardcore/ratio_system.hpp"
#include "hardcore/recursion.hpp"

namespace hardcore {

// A solution (z1-, z1+, z2-, z2+) of the extremal system that brackets every
// field solution of the recursion componentwise.
struct Envelope {
  Builtin model = Builtin::Hinge;
  double lambda = 0.0;
  int k = 0;
  double z1_minus = 0.0;
  double z1_plus = 0.0;
  double z2_minus = 0.0;
  double z2_plus = 0.0;
  // Set when the hinge k = 2 closed form applies (lambda > 9/4).
  std::optional<double> z_minus;
  double residual = 0.0;

  bool collapsed(double tol = 1e-8) const;
  std::vector<double> as_vector() const { return {z1_minus, z1_plus, z2_minus, z2_plus}; }
};

// The four-equation extremal system for hinge or pipe, unknowns ordered
// (z1-, z1+, z2-, z2+).
RatioSystem envelope_system(Builtin model, double lambda, int k);
double envelope_residual(const Envelope& e);

// Every ordered (z_i- <= z_i+) solution of the extremal system. The hinge
// system splits into two copies of the TI system, one in (z1-, z2+) and one
// in (z1+, z2-); the pipe system is solved as a whole.
std::vector<Envelope> solve_envelope_system(Builtin model, double lambda, int k);

// Envelope solutions in the extremal sense. For the hinge, mixed solutions
// pairing the symmetric TI point with an asymmetric branch are dropped: when
// asymmetric branches exist the result holds the solutions built from them
// alone, otherwise the single point collapsed onto the symmetric TI
// solution. For the pipe this is solve_envelope_system unchanged.
std::vector<Envelope> solve_envelope(Builtin model, double lambda, int k);

// z- = ((1 - sqrt(1 - 4a^2)) / 2a)^2 with a = 2 / (sqrt(lam) + sqrt(lam + 4)),
// the lower hinge branch at k = 2. Requires lam > 9/4.
double z_minus_hinge_k2(double lambda);

// Every component of every non-root vertex lies in [z-, 1/z-] (hinge, k = 2,
// lam > 9/4) or in the outermost envelope returned by solve_envelope, with
// `slack` tolerance.
bool envelope_check(Builtin model, double lambda, int k, const Field& field, double slack = 1e-9);

// z1- = z1+ iff z2- = z2+ (tolerance 1e-8). Returns false when e does not
// solve its system to 1e-10.
bool envelope_symmetry_check(const Envelope& e);

}  // namespace hardcore
