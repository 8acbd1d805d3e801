#include "hardcore/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "hardcore/errors.hpp"
#include "hardcore/ti_solver.hpp"

namespace hardcore {

namespace {

enum : int { kZ1Minus = 0, kZ1Plus = 1, kZ2Minus = 2, kZ2Plus = 3 };

AffineForm affine(double constant, std::initializer_list<std::pair<int, double>> terms) {
  AffineForm f;
  f.constant = constant;
  f.coeffs.assign(4, 0.0);
  for (auto [index, coeff] : terms) f.coeffs[static_cast<std::size_t>(index)] += coeff;
  return f;
}

RatioEquation equation(int target, double lambda, int k, AffineForm num, AffineForm den) {
  return {target, lambda, std::move(num), std::move(den), static_cast<double>(k)};
}

bool ordered(double lo, double hi) { return lo <= hi + 1e-9 * std::max(1.0, std::abs(hi)); }

void require_model(Builtin model) {
  if (model != Builtin::Hinge && model != Builtin::Pipe) throw InvalidInput("envelopes are available for hinge and pipe");
}

Envelope make_envelope(Builtin model, double lambda, int k, const std::vector<double>& v) {
  Envelope e;
  e.model = model;
  e.lambda = lambda;
  e.k = k;
  e.z1_minus = v[kZ1Minus];
  e.z1_plus = v[kZ1Plus];
  e.z2_minus = v[kZ2Minus];
  e.z2_plus = v[kZ2Plus];
  if (model == Builtin::Hinge && k == 2 && lambda > 2.25) e.z_minus = z_minus_hinge_k2(lambda);
  e.residual = envelope_residual(e);
  return e;
}

// Hinge k = 2: every component must be z- or 1/z-, or the symmetric point.
void cross_validate_k2(const Envelope& e, bool all_asymmetric) {
  if (!e.z_minus || !all_asymmetric) return;
  const double zm = *e.z_minus;
  for (double v : e.as_vector()) {
    if (std::abs(v - zm) > 1e-9 && std::abs(v - 1.0 / zm) > 1e-9 * std::max(1.0, 1.0 / zm)) {
      throw NumericalFailure("hinge envelope disagrees with the closed form");
    }
  }
}

}  // namespace

bool Envelope::collapsed(double tol) const {
  return same_point({z1_minus}, {z1_plus}, tol) && same_point({z2_minus}, {z2_plus}, tol);
}

RatioSystem envelope_system(Builtin model, double lambda, int k) {
  require_model(model);
  if (!(lambda > 0.0)) throw InvalidInput("lambda must be > 0");
  if (k < 1) throw InvalidInput("k must be >= 1");
  std::vector<RatioEquation> eqs;
  if (model == Builtin::Hinge) {
    eqs.push_back(equation(kZ1Minus, lambda, k, affine(1, {{kZ1Minus, 1}}), affine(1, {{kZ1Minus, 1}, {kZ2Plus, 1}})));
    eqs.push_back(equation(kZ1Plus, lambda, k, affine(1, {{kZ1Plus, 1}}), affine(1, {{kZ1Plus, 1}, {kZ2Minus, 1}})));
    eqs.push_back(equation(kZ2Minus, lambda, k, affine(1, {{kZ2Minus, 1}}), affine(1, {{kZ1Plus, 1}, {kZ2Minus, 1}})));
    eqs.push_back(equation(kZ2Plus, lambda, k, affine(1, {{kZ2Plus, 1}}), affine(1, {{kZ1Minus, 1}, {kZ2Plus, 1}})));
  } else {
    eqs.push_back(equation(kZ1Minus, lambda, k, affine(1, {{kZ2Minus, 1}}), affine(1, {{kZ1Plus, 1}})));
    eqs.push_back(equation(kZ1Plus, lambda, k, affine(1, {{kZ2Plus, 1}}), affine(1, {{kZ1Minus, 1}})));
    eqs.push_back(equation(kZ2Minus, lambda, k, affine(0, {{kZ1Minus, 1}}), affine(1, {{kZ1Minus, 1}})));
    eqs.push_back(equation(kZ2Plus, lambda, k, affine(0, {{kZ1Plus, 1}}), affine(1, {{kZ1Plus, 1}})));
  }
  return RatioSystem(4, std::move(eqs));
}

double envelope_residual(const Envelope& e) { return envelope_system(e.model, e.lambda, e.k).defect(e.as_vector()); }

double z_minus_hinge_k2(double lambda) {
  if (!(lambda > 2.25)) throw InvalidInput("z- is real only for lambda > 9/4");
  const auto cf = closed_form_k2(lambda, 4.0);
  if (!cf) throw InvalidInput("z- is real only for lambda > 9/4");
  return cf->lower;
}

std::vector<Envelope> solve_envelope_system(Builtin model, double lambda, int k) {
  require_model(model);
  std::vector<Envelope> out;
  if (model == Builtin::Hinge) {
    const auto ti = count_ti_solutions(builtin(Builtin::Hinge), ActivityVector::uniform(2, lambda), k);
    // (z1-, z2+) and (z1+, z2-) each solve the TI system on their own.
    for (const auto& outer : ti) {
      for (const auto& inner : ti) {
        const std::vector<double> v{outer.z1(), inner.z1(), inner.z2(), outer.z2()};
        if (!ordered(v[kZ1Minus], v[kZ1Plus]) || !ordered(v[kZ2Minus], v[kZ2Plus])) continue;
        auto e = make_envelope(model, lambda, k, v);
        cross_validate_k2(e, outer.kind != SolutionKind::Symmetric && inner.kind != SolutionKind::Symmetric);
        out.push_back(e);
      }
    }
  } else {
    const auto system = envelope_system(model, lambda, k);
    std::vector<std::vector<double>> seeds;
    for (const auto& p : log_grid(2, 40, 1e-4, 1e4)) {
      const double z1m = p[0];
      const double z1p = p[1];
      seeds.push_back({z1m, z1p, lambda * std::pow(z1m / (1 + z1m), k), lambda * std::pow(z1p / (1 + z1p), k)});
    }
    for (const auto& root : multistart(system, seeds)) {
      if (!ordered(root.z[kZ1Minus], root.z[kZ1Plus]) || !ordered(root.z[kZ2Minus], root.z[kZ2Plus])) continue;
      out.push_back(make_envelope(model, lambda, k, root.z));
    }
  }
  if (out.empty()) throw NumericalFailure("extremal system has no ordered solution");
  return out;
}

std::vector<Envelope> solve_envelope(Builtin model, double lambda, int k) {
  auto all = solve_envelope_system(model, lambda, k);
  if (model != Builtin::Hinge) return all;
  const auto sym = solve_hinge_symmetric(lambda, k);
  auto on_symmetric = [&](double a, double b) { return same_point({a, b}, sym.z, 1e-7); };
  std::vector<Envelope> asymmetric;
  std::vector<Envelope> diagonal;
  for (const auto& e : all) {
    const bool outer_sym = on_symmetric(e.z1_minus, e.z2_plus);
    const bool inner_sym = on_symmetric(e.z1_plus, e.z2_minus);
    if (!outer_sym && !inner_sym) asymmetric.push_back(e);
    if (outer_sym && inner_sym) diagonal.push_back(e);
  }
  if (!asymmetric.empty()) return asymmetric;
  if (diagonal.empty()) throw NumericalFailure("symmetric point missing from the extremal system");
  return diagonal;
}

bool envelope_check(Builtin model, double lambda, int k, const Field& field, double slack) {
  require_model(model);
  if (field.q() != 2) throw InvalidInput("envelope_check expects a two-component field");
  double lo1, hi1, lo2, hi2;
  if (model == Builtin::Hinge && k == 2 && lambda > 2.25) {
    const double zm = z_minus_hinge_k2(lambda);
    lo1 = lo2 = zm;
    hi1 = hi2 = 1.0 / zm;
  } else {
    const auto envs = solve_envelope(model, lambda, k);
    lo1 = lo2 = std::numeric_limits<double>::infinity();
    hi1 = hi2 = 0.0;
    for (const auto& e : envs) {
      lo1 = std::min(lo1, e.z1_minus);
      hi1 = std::max(hi1, e.z1_plus);
      lo2 = std::min(lo2, e.z2_minus);
      hi2 = std::max(hi2, e.z2_plus);
    }
  }
  // The root has k + 1 children and is not bound by the envelope.
  for (std::size_t v = 1; v < field.size(); ++v) {
    const auto z = field.at(v);
    if (z[0] < lo1 - slack || z[0] > hi1 + slack || z[1] < lo2 - slack || z[1] > hi2 + slack) return false;
  }
  return true;
}

bool envelope_symmetry_check(const Envelope& e) {
  if (!(envelope_residual(e) <= 1e-10)) return false;
  const bool first = same_point({e.z1_minus}, {e.z1_plus}, 1e-8);
  const bool second = same_point({e.z2_minus}, {e.z2_plus}, 1e-8);
  return first == second;
}

}  // namespace hardcore
