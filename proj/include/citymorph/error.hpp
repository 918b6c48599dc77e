#ifndef CITYMORPH_ERROR_HPP
#define CITYMORPH_ERROR_HPP

#include <stdexcept>
#include <string>

namespace citymorph {

enum class ErrorKind {
  validation,  // bad configuration or arguments
  data,        // malformed or inconsistent input data
  empty_city,  // clipping or metrics on a city without nodes
  degenerate,  // coincident points where a direction is required
  internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class DataError : public Error {
public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class EmptyCityError : public Error {
public:
  explicit EmptyCityError(const std::string& city)
      : Error(ErrorKind::empty_city, "empty city: " + city), city_(city) {}

  const std::string& city() const noexcept { return city_; }

private:
  std::string city_;
};

class DegenerateGeometryError : public Error {
public:
  explicit DegenerateGeometryError(const std::string& where)
      : Error(ErrorKind::degenerate, "degenerate geometry at " + where) {}
};

/// Process exit code for an error kind: 2 validation, 3 data, 4 internal.
inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation: return 2;
    case ErrorKind::data:
    case ErrorKind::empty_city:
    case ErrorKind::degenerate: return 3;
    case ErrorKind::internal: return 4;
  }
  return 4;
}

}  // namespace citymorph

#endif  // CITYMORPH_ERROR_HPP
