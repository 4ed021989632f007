#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace pcs {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Sampling scenario. Distinct: every sensor draws its own rows, profiles
/// normalized to C^{-1} sum H_c^* H_c = I. Identical: one shared row stack,
/// profiles normalized to sum H_c^* H_c = I.
enum class Scenario { distinct, identical };

std::string_view to_string(Scenario s);
Scenario scenario_from_string(std::string_view name);

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input: bad parameters, dimension mismatch, malformed configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

class DimensionError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// A computation could not be carried out on otherwise valid input.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// No rescaling can enforce the joint isometry condition (a zero column or
/// eigenvalue stack across all sensors).
class DegenerateProfileError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

using Rng = std::mt19937_64;

/// Derives an independent generator for a substream identified by `path`
/// (e.g. {tag, sensor} or {cell, trial}) of the master seed. Identical
/// (seed, path) pairs give identical streams.
Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

/// Derives a child seed from a master seed and a substream path.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

/// 64-bit FNV-1a, used for configuration fingerprints.
std::uint64_t fnv1a(std::string_view bytes);

} // namespace pcs
