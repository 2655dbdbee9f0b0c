#pragma once

// Closed-form references used for report verdicts.

#include <array>
#include <vector>

#include "chaos_ns/spectral_field.hpp"
#include "chaos_ns_cli/config.hpp"

namespace chaos_ns::cli {

/// Zero-noise, unforced Taylor-Green start: energy decays as exp(-2 nu |k|^2 t).
bool taylor_green_oracle_applies(const ExperimentConfig& config);
double taylor_green_energy(const ExperimentConfig& config, double e0, double t);

/// Convection off, no transport noise, no h coupling, no deterministic
/// forcing: the solution is Gaussian with an explicit mean and variance.
bool linear_oracle_applies(const ExperimentConfig& config);

struct LinearReference {
  SpectralField mean;
  double mean_energy = 0.0;
  double variance = 0.0;  // E|u - Eu|_2^2
};

/// Mean: e^{(-nu|k|^2 + i b.k) t} S u0. Variance: sum over projected g_k and
/// waves q of |c|^2 (1 - e^{-2 lambda t}) / (2 lambda), lambda = nu |q|^2.
LinearReference linear_reference(const Experiment& experiment, const ExperimentConfig& config, double t);

}  // namespace chaos_ns::cli
