#ifndef UDTOMO_ERRORS_HPP
#define UDTOMO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace udtomo {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct HermiticityError : Error {
  using Error::Error;
};

struct IndexError : Error {
  using Error::Error;
};

struct NormError : Error {
  using Error::Error;
};

struct FormError : Error {
  using Error::Error;
};

struct DegenerateParamsError : Error {
  using Error::Error;
};

struct InvalidDensityError : Error {
  using Error::Error;
};

}  // namespace udtomo

#endif
