#pragma once

#include <cstdint>
#include <random>

#include "sqg/eigenbasis.hpp"

namespace sqg {

/// Lambda^s f: coefficients scaled by lambda_j^{s/2}. Only s >= -1 is
/// accepted; Lambda^{-1} is the one negative power the velocity law needs.
SpectralField frac_laplacian(const SpectralField& f, double s);

/// ||f||_{s,D} = (sum_j lambda_j^s f_j^2)^{1/2}, s >= 0.
double sobolev_norm(const SpectralField& f, double s);

/// ||f||_{a1}^mu ||f||_{a2}^{1-mu} - ||f||_{mu a1 + (1-mu) a2}; nonnegative
/// by Hoelder. Throws DomainError on f = 0.
double interpolation_slack(const SpectralField& f, double alpha1, double alpha2, double mu);

/// Zeroes every mode with j > cutoff or k > cutoff (the projection P onto
/// {1..cutoff}^2).
SpectralField truncate(const SpectralField& f, int cutoff);

/// Gaussian coefficients with amplitude (lambda_j/lambda_1)^{-decay/2}.
SpectralField random_field(const BasisPtr& basis, std::mt19937_64& rng, double decay = 0.0);

/// Same field rescaled so that ||f||_{s,D} = target. Throws on f = 0.
SpectralField with_sobolev_norm(SpectralField f, double s, double target);

}  // namespace sqg
