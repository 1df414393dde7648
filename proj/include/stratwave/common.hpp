#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace stratwave {

inline constexpr double pi = std::numbers::pi;

using cplx = std::complex<double>;

// Base class for every failure reported by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Input rejected before any computation started.
class InvalidInput : public Error {
public:
  using Error::Error;
};

// A numerical procedure did not reach its target.
class SolveFailure : public Error {
public:
  SolveFailure(const std::string &what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

template <typename T>
constexpr T sqr(const T &v) {
  return v * v;
}

} // namespace stratwave
