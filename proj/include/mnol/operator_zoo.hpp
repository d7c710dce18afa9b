#pragma once

#include <span>
#include <string>
#include <utility>

#include "mnol/grid_function.hpp"
#include "mnol/quadrature.hpp"

namespace mnol {

enum class FamilyKind { kHomogeneousKernel, kFractionalKernel, kGreenDirichlet, kHeatSemigroup, kBurgersColeHopf };

/// Radial profiles, each normalized to unit mass on the real line:
/// indicator ½·1{r ≤ 1}, hat (1 − r)₊, gaussian exp(−r²/2)/√(2π).
enum class RadialProfile { kIndicator, kHat, kGaussian };

/// How u is continued outside its box for whole-line integrals.
enum class Extension { kClamp, kPeriodic };

struct OperatorFamily {
  FamilyKind kind = FamilyKind::kGreenDirichlet;
  RadialProfile profile = RadialProfile::kIndicator;
  double fractional_c = 1.0;
  double t = 0.5;  ///< heat / Burgers time horizon
  Extension extension = Extension::kClamp;
};

std::string to_string(FamilyKind kind);
FamilyKind parse_family_kind(const std::string& name);
std::string to_string(RadialProfile profile);
RadialProfile parse_radial_profile(const std::string& name);
std::string to_string(Extension ext);
Extension parse_extension(const std::string& name);

double radial_profile(RadialProfile profile, double r);

double green_kernel(double a, double x, double y);
double green_kernel_relu_form(double a, double x, double y);
double green_apply(double a, const GridFunction& u, double x, const QuadratureRule& rule);

/// Homogeneous or fractional kernel integral over the box of u (one-dimensional).
double kernel_apply(const OperatorFamily& family, const GridFunction& alpha, const GridFunction& u,
                    std::span<const double> x, const QuadratureRule& rule);

/// Heat-kernel density Γ_ν(t, z).
double heat_kernel(double nu, double t, double z);
/// Default whole-line window half-width 8√(2νt).
double default_window(double nu, double t);

double heat_apply(double nu, double t, const GridFunction& u, double x, const QuadratureRule& rule,
                  Extension ext = Extension::kClamp);
double burgers_cole_hopf(double nu, double t, const GridFunction& u, double x, const QuadratureRule& rule,
                         Extension ext = Extension::kClamp);

/// Smallest step count satisfying the explicit-scheme stability condition.
int fd_min_steps(double nu, double t, const GridFunction& u, int grid_n);
/// Periodic central-difference / forward-Euler solution of z_t + z z_x = ν z_xx
/// on the box of u, returned as a periodic piecewise-linear interpolant.
GridFunction burgers_fd_reference(double nu, double t, const GridFunction& u, int grid_n, int steps);

/// G[α][u](x) for any family. Green, heat and Burgers read their scalar
/// parameter (a or ν) from α at the midpoint of its box.
double family_eval(const OperatorFamily& family, const GridFunction& alpha, const GridFunction& u,
                   std::span<const double> x, const QuadratureRule& rule);

/// Checks that the α and u function spaces fit the family (throws ConfigError).
void validate_family_specs(const OperatorFamily& family, const FunctionSpaceSpec& alpha_spec,
                           const FunctionSpaceSpec& u_spec);

/// Box [lo, hi] (per axis) from which evaluation points x are drawn.
std::pair<double, double> output_domain(const OperatorFamily& family, const FunctionSpaceSpec& alpha_spec,
                                        const FunctionSpaceSpec& u_spec);
int output_dim(const OperatorFamily& family, const FunctionSpaceSpec& u_spec);

/// Declared bound β_V on |G[α][u](x)| over the two function spaces.
double output_bound(const OperatorFamily& family, const FunctionSpaceSpec& alpha_spec, const FunctionSpaceSpec& u_spec,
                    const QuadratureRule& rule);

}  // namespace mnol
