#pragma once

#include <vector>

#include "deltawall/spectrum.hpp"
#include "deltawall/well.hpp"

namespace deltawall {

// Energy of level n of the clean box, E_n = (hbar pi n / L)^2 / (2 m).
double unperturbed_energy(int n, const WellConfig& cfg = {});

// Characteristic function of the oscillatory branch at wavenumber k > 0:
//   F(k) = k sin(k L) + (2 m g / hbar^2) sin(k X) sin(k (L - X)).
// Its positive zeros are the eigen-wavenumbers of the walled box, except
// at exceptional coincidences where a factor vanishes identically.
double characteristic_value(double k, double g, double x, const WellConfig& cfg = {});

// Characteristic function of the evanescent branch at kappa > 0 (energy
// E = -hbar^2 kappa^2 / 2m):
//   G(kappa) = kappa sinh(kappa L) + (2 m g / hbar^2) sinh(kappa X) sinh(kappa (L - X)).
// For large kappa the sinh factors overflow; the return value is then a
// correctly signed infinity rather than NaN.  Root finding uses an
// exponentially rescaled form internally and is overflow free.
double characteristic_value_negative(double kappa, double g, double x,
                                     const WellConfig& cfg = {});

// Strength below which the ground state dives to negative energy:
//   g_th = - hbar^2 L / (2 m X (L - X)).
double ground_negative_threshold(double x, const WellConfig& cfg = {});

// Indices n in 1..n_max whose clean-box eigenfunction has a node at the
// wall position (|sin(n pi X / L)| < node_tolerance).  Those levels do not
// feel the wall at any strength.
std::vector<int> exceptional_levels(double x, int n_max, const WellConfig& cfg = {});

// Spectrum of the two fully separated sub-boxes [0,X] and [X,L] in the
// g -> +inf limit, merged in ascending order with side labels attached.
// Degenerate pairs (equal energies at rational X/L) are ordered Left
// before Right.
Spectrum separated_spectrum(double x, int count, const WellConfig& cfg = {});

// Lowest n_max eigenvalues of the box with wall (g, X).  Finite g only;
// symbolic infinities are served by separated_spectrum.  At most one level
// (the ground state, for g below ground_negative_threshold) lies on the
// evanescent branch.
Spectrum solve_spectrum(const WallState& wall, int n_max, const WellConfig& cfg = {});

// Normalized eigenfunction of level n (1-based, as indexed by
// solve_spectrum) in piecewise closed form.
PiecewiseEigenfunction eigenfunction(const WallState& wall, int n,
                                     const WellConfig& cfg = {});

} // namespace deltawall
